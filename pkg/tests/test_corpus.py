import unittest
from dataclasses import replace

import numpy as np

from src.gshift.classifier import classify
from src.gshift.config import Budget
from src.gshift.configuration import Alphabet, Configuration, iter_orbit_distances
from src.gshift.corpus import (
    REGIMES,
    generate,
    invariant_violations,
    regime,
    run_corpus,
)
from src.gshift.dynamics_lab import sample_agreeing_configuration, sample_box_configuration
from src.gshift.dyadic import Dyadic
from src.gshift.errors import InvariantViolation
from src.gshift.index_map import (
    MapSpec,
    core_bound,
    orbit_intersection_times,
    per_empty,
    w_nonempty,
)
from src.gshift.witnesses import (
    dense_chaos_refutation,
    non_sensitivity_certificate,
    sensitivity_witness,
)

SEED = 42
CORPUS = generate(100, SEED)
STEPS = 200
SAMPLES = 50


def _indices(spec: MapSpec) -> range:
    return range(1, core_bound(spec) + 25)


class TestGenerate(unittest.TestCase):
    def test_deterministic(self):
        self.assertEqual(generate(10, 7), generate(10, 7))
        self.assertNotEqual(generate(10, 7), generate(10, 8))

    def test_names_and_regimes(self):
        self.assertEqual(CORPUS[3].name, "corpus-42-3")
        self.assertEqual({regime(d.spec) for d in CORPUS}, set(REGIMES))
        for document in CORPUS:
            with self.subTest(name=document.name):
                self.assertIn(document.alphabet_size, (2, 3))
                self.assertGreaterEqual(document.spec.tail(document.spec.threshold + 1), 1)

    def test_rejects_empty_corpus(self):
        with self.assertRaises(InvariantViolation):
            generate(0, SEED)

    def test_regime(self):
        self.assertEqual(regime(MapSpec.build(2)), "expanding")
        self.assertEqual(regime(MapSpec.build(1, 2)), "translation")
        self.assertEqual(regime(MapSpec.build(1, -1, {1: 1})), "bounded")
        self.assertEqual(regime(MapSpec.build(0, 4)), "bounded")


class TestCorpusInvariants(unittest.TestCase):
    def test_no_violations(self):
        for document in CORPUS:
            profile = classify(document.spec, document.alphabet_size)
            with self.subTest(name=document.name):
                self.assertEqual(invariant_violations(document.spec, profile), [])
                if per_empty(document.spec):
                    self.assertTrue(w_nonempty(document.spec))

    def test_flags_ignore_alphabet_size(self):
        for document in CORPUS:
            with self.subTest(name=document.name):
                self.assertEqual(
                    classify(document.spec, 2).flags(), classify(document.spec, 3).flags()
                )

    def test_violations_catch_corrupted_profiles(self):
        document = next(d for d in CORPUS if per_empty(d.spec))
        profile = classify(document.spec, document.alphabet_size)
        corrupted = replace(profile, li_yorke_sensitive=False)
        self.assertNotEqual(invariant_violations(document.spec, corrupted), [])

    def test_intersection_count_bound(self):
        rng = np.random.default_rng(SEED)
        for document in (d for d in CORPUS if per_empty(d.spec)):
            spec = document.spec
            for _ in range(5):
                a_set = {int(n) for n in rng.integers(1, 30, size=rng.integers(1, 5))}
                b_set = {int(n) for n in rng.integers(1, 30, size=rng.integers(1, 5))}
                times = orbit_intersection_times(spec, a_set, b_set, 50)
                with self.subTest(map=spec.describe(), a=sorted(a_set), b=sorted(b_set)):
                    self.assertLessEqual(len(times), len(a_set) * len(b_set))


class TestExactBounds(unittest.TestCase):
    """Witness and refutation bounds replayed on the corpus with zero tolerance."""

    def test_sensitivity_witnesses(self):
        for document in (d for d in CORPUS if w_nonempty(d.spec)):
            spec, alphabet = document.spec, Alphabet(document.alphabet_size)
            x = sample_box_configuration(
                np.random.default_rng(SEED), alphabet, (), _indices(spec)
            )
            witness = sensitivity_witness(spec, alphabet, x, {1, 2, 3})
            depth = max(16, witness.theta_index)
            short = [
                t
                for t, iv in iter_orbit_distances(spec, x, witness.z, STEPS, depth)
                if t >= witness.from_step and iv.lower < witness.separation
            ]
            with self.subTest(name=document.name):
                self.assertEqual(short, [])

    def test_refutation_boxes(self):
        for document in (d for d in CORPUS if not per_empty(d.spec)):
            spec, alphabet = document.spec, Alphabet(document.alphabet_size)
            refutation = dense_chaos_refutation(spec, alphabet)
            depth = max(16, refutation.position)
            rng = np.random.default_rng(SEED)
            failures = 0
            for _ in range(SAMPLES):
                x = sample_box_configuration(rng, alphabet, refutation.box_u, _indices(spec))
                y = sample_box_configuration(rng, alphabet, refutation.box_v, _indices(spec))
                if not all(
                    refutation.holds(iv)
                    for _, iv in iter_orbit_distances(spec, x, y, STEPS, depth)
                ):
                    failures += 1
            with self.subTest(name=document.name):
                self.assertEqual(failures, 0)

    def test_non_sensitivity_certificates(self):
        epsilon = Dyadic.pow2(-3)
        for document in (d for d in CORPUS if not w_nonempty(d.spec)):
            spec, alphabet = document.spec, Alphabet(document.alphabet_size)
            certificate = non_sensitivity_certificate(spec, epsilon)
            rng = np.random.default_rng(SEED)
            x = Configuration.constant(alphabet, 0)
            failures = 0
            for _ in range(SAMPLES):
                y = sample_agreeing_configuration(rng, x, certificate.lambda_set, _indices(spec))
                if not all(
                    certificate.holds(iv)
                    for _, iv in iter_orbit_distances(spec, x, y, STEPS, certificate.depth)
                ):
                    failures += 1
            with self.subTest(name=document.name):
                self.assertEqual(failures, 0)


class TestRunCorpus(unittest.TestCase):
    budget = Budget(horizon=32, depth=8, window=8, samples=3)

    def test_small_budget_run_is_ok(self):
        report = run_corpus(30, SEED, self.budget)
        self.assertTrue(report.ok)
        self.assertIsNone(report.first_offender)
        data = report.to_json()
        self.assertEqual(data["count"], 30)
        self.assertEqual(sum(row["maps"] for row in data["summary"].values()), 30)
        self.assertTrue(set(data["summary"]) <= set(REGIMES))

    def test_summary_frame(self):
        frame = run_corpus(6, SEED, self.budget).summary_frame()
        self.assertEqual(len(frame), 6)
        self.assertEqual(list(frame["name"]), [f"corpus-{SEED}-{i}" for i in range(6)])
        self.assertTrue(frame["ok"].all())

    def test_corrupted_classifier_is_reported(self):
        report = run_corpus(
            10, SEED, self.budget, corrupt=lambda p: replace(p, sensitive=not p.sensitive)
        )
        self.assertFalse(report.ok)
        self.assertEqual(report.first_offender.document.name, f"corpus-{SEED}-0")
        self.assertIsNotNone(report.to_json()["offender"])

    def test_deterministic(self):
        first = run_corpus(8, 3, self.budget).to_json()
        second = run_corpus(8, 3, self.budget).to_json()
        self.assertEqual(first, second)


if __name__ == "__main__":
    unittest.main()
