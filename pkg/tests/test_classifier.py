import math
import unittest
from dataclasses import replace

from src.gshift.classifier import (
    LI_YORKE_GROUP,
    SENSITIVITY_GROUP,
    ChaosProfile,
    classify,
    entropy,
    entropy_to_json,
)
from src.gshift.errors import AlphabetTooSmall
from src.gshift.index_map import MapSpec, orbit_count

REFERENCE_MAPS = {
    "phi1": MapSpec.build(2),
    "phi2": MapSpec.build(2, 0, {1: 3, 2: 3}),
    "phi3": MapSpec.build(2, 0, {2: 2}),
    "phi4": MapSpec.build(1, -1, {1: 1}),
}


class TestGoldenDiagram(unittest.TestCase):
    def test_reference_maps(self):
        expected = {
            "phi1": {"devaney_chaotic": True, "li_yorke_sensitive": True, "sensitive": True},
            "phi2": {"devaney_chaotic": False, "li_yorke_sensitive": True, "sensitive": True},
            "phi3": {"devaney_chaotic": False, "li_yorke_sensitive": False, "sensitive": True},
            "phi4": {"devaney_chaotic": False, "li_yorke_sensitive": False, "sensitive": False},
        }
        for name, flags in expected.items():
            profile = classify(REFERENCE_MAPS[name], 2)
            for flag, value in flags.items():
                with self.subTest(map=name, flag=flag):
                    self.assertEqual(getattr(profile, flag), value)

    def test_phi4_is_all_false(self):
        profile = classify(REFERENCE_MAPS["phi4"], 2)
        self.assertFalse(any(profile.flags().values()))
        self.assertEqual(profile.entropy, 0.0)

    def test_groups_collapse(self):
        for name, spec in REFERENCE_MAPS.items():
            profile = classify(spec, 2)
            with self.subTest(map=name):
                self.assertEqual(len({getattr(profile, f) for f in LI_YORKE_GROUP}), 1)
                self.assertEqual(len({getattr(profile, f) for f in SENSITIVITY_GROUP}), 1)
                self.assertEqual(profile.coherence_errors(), [])

    def test_dense_periodic_points_follow_injectivity(self):
        self.assertTrue(classify(REFERENCE_MAPS["phi1"], 2).dense_periodic_points)
        self.assertFalse(classify(REFERENCE_MAPS["phi2"], 2).dense_periodic_points)
        self.assertTrue(classify(MapSpec.build(1, 2), 2).dense_periodic_points)


class TestEntropy(unittest.TestCase):
    def test_values(self):
        self.assertEqual(entropy(REFERENCE_MAPS["phi4"], 2), 0.0)
        self.assertEqual(entropy(REFERENCE_MAPS["phi1"], 2), math.inf)
        self.assertEqual(entropy(MapSpec.build(1, 2), 3), 2 * math.log(3))

    def test_symbolic_report(self):
        spec = MapSpec.build(1, 2)
        self.assertEqual(
            entropy_to_json(orbit_count(spec), 3),
            {
                "orbit_count": 2,
                "exactness": "exact",
                "alphabet_size": 3,
                "log_base": "e",
                "value": 2 * math.log(3),
            },
        )
        infinite = entropy_to_json(orbit_count(REFERENCE_MAPS["phi1"]), 2)
        self.assertEqual(infinite["orbit_count"], "infinity")
        self.assertEqual(infinite["value"], "infinity")

    def test_alphabet_too_small(self):
        with self.assertRaises(AlphabetTooSmall):
            entropy(REFERENCE_MAPS["phi1"], 1)
        with self.assertRaises(AlphabetTooSmall):
            classify(REFERENCE_MAPS["phi1"], 1)


class TestChaosProfile(unittest.TestCase):
    def test_flag_groups(self):
        groups = ChaosProfile.flag_groups()
        self.assertEqual(groups["li_yorke_sensitive"], LI_YORKE_GROUP)
        self.assertEqual(groups["sensitive"], SENSITIVITY_GROUP)

    def test_coherence_errors_catch_corruption(self):
        profile = classify(REFERENCE_MAPS["phi3"], 2)
        corrupted = [
            replace(profile, devaney_chaotic=True),
            replace(profile, li_yorke_sensitive=True),
            replace(profile, multi_sensitive=False),
            replace(profile, topologically_chaotic=False),
        ]
        for i, bad in enumerate(corrupted):
            with self.subTest(case=i):
                self.assertNotEqual(bad.coherence_errors(), [])

    def test_to_json(self):
        data = classify(REFERENCE_MAPS["phi1"], 2).to_json()
        self.assertTrue(data["devaney_chaotic"])
        self.assertEqual(data["alphabet_size"], 2)
        self.assertEqual(data["entropy"]["value"], "infinity")
        self.assertEqual(len([v for v in data.values() if isinstance(v, bool)]), 16)


if __name__ == "__main__":
    unittest.main()
