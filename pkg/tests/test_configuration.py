import unittest
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.gshift.configuration import (
    Alphabet,
    BlockSchedule,
    Configuration,
    Constant,
    DistanceInterval,
    Enumeration,
    OrbitMarked,
    Periodic,
    TailSchedule,
    coordinate,
    difference_support,
    distance,
    iter_orbit_distances,
    orbit_distance,
    shift_configuration,
    shifted_coordinate,
)
from src.gshift.corpus import random_map
from src.gshift.dyadic import ZERO, Dyadic
from src.gshift.errors import (
    AlphabetMismatch,
    AlphabetTooSmall,
    InvariantViolation,
    NotMaterializable,
)
from src.gshift.index_map import MapSpec, iterate

PHI1 = MapSpec.build(2)
PHI2 = MapSpec.build(2, 0, {1: 3, 2: 3})
BINARY = Alphabet(2)

symbols = st.integers(0, 2)
fills = st.one_of(
    st.builds(Constant, symbols),
    st.lists(symbols, min_size=1, max_size=3).map(lambda pattern: Periodic(tuple(pattern))),
)


@st.composite
def ternary_configurations(draw, fill=fills):
    overrides = draw(st.dictionaries(st.integers(1, 12), symbols, max_size=5))
    return Configuration(Alphabet(3), tuple(overrides.items()), draw(fill))


class TestConfiguration(unittest.TestCase):
    def test_coordinates(self):
        x = Configuration(BINARY, ((3, 1),))
        self.assertEqual(x[3], 1)
        self.assertEqual(x[4], 0)
        periodic = Configuration(BINARY, fill=Periodic((0, 1)))
        self.assertEqual([periodic[n] for n in range(1, 5)], [0, 1, 0, 1])
        with self.assertRaises(InvariantViolation):
            coordinate(x, 0)

    def test_alphabet(self):
        with self.assertRaises(AlphabetTooSmall):
            Alphabet(1)
        with self.assertRaises(InvariantViolation):
            Configuration(BINARY, ((1, 2),))
        with self.assertRaises(InvariantViolation):
            Configuration(BINARY, fill=Constant(5))
        self.assertEqual(Alphabet.least_other(0), 1)
        self.assertEqual(Alphabet.least_other(1), 0)
        self.assertEqual(Alphabet.least_other(2), 0)

    def test_with_overrides(self):
        x = Configuration(BINARY, ((3, 1),)).with_overrides({5: 1, 3: 0})
        self.assertEqual(x.overrides, ((3, 0), (5, 1)))

    def test_orbit_marked_fill(self):
        blocks = Configuration(BINARY, fill=OrbitMarked(PHI1, 1, BlockSchedule(), Constant(0)))
        # orbit positions 2, 3 and 8..15 are marked, 1 and 4..7 are not
        marked = {4: 1, 8: 1, 256: 1, 2**15: 1, 2: 0, 16: 0, 2**7: 0, 3: 0, 6: 0}
        for n, symbol in marked.items():
            with self.subTest(n=n):
                self.assertEqual(blocks[n], symbol)
        tail = Configuration(BINARY, fill=OrbitMarked(PHI1, 1, TailSchedule(3), Constant(1)))
        self.assertEqual(tail[8], 0)
        self.assertEqual(tail[4], 1)
        self.assertEqual(tail[5], 1)

    def test_schedules(self):
        schedule = BlockSchedule()
        self.assertEqual(
            [m for m in range(64) if schedule.contains(m)],
            [2, 3, *range(8, 16), *range(32, 64)],
        )
        self.assertTrue(TailSchedule(4).contains(4))
        self.assertFalse(TailSchedule(4).contains(3))


class TestEnumeration(unittest.TestCase):
    def test_permutation(self):
        enumeration = Enumeration.from_order([2, 1, 3])
        self.assertEqual(enumeration.index_at(1), 2)
        self.assertEqual(enumeration.position_of(2), 1)
        self.assertEqual(enumeration.index_at(7), 7)
        self.assertFalse(enumeration.is_identity)
        self.assertTrue(Enumeration.from_order([1, 2, 3]).is_identity)

    def test_rejects_non_permutations(self):
        with self.assertRaises(InvariantViolation):
            Enumeration(((1, 2),))
        with self.assertRaises(InvariantViolation):
            Enumeration.from_order([1, 1])


class TestDistance(unittest.TestCase):
    def setUp(self):
        self.zero = Configuration.constant(BINARY, 0)

    def test_exact_when_differences_are_shallow(self):
        y = Configuration(BINARY, ((2, 1),))
        interval = distance(self.zero, y, 4)
        self.assertTrue(interval.is_exact)
        self.assertEqual(interval.lower, Dyadic.pow2(-2))

    def test_remainder_when_differences_are_deep(self):
        y = Configuration(BINARY, ((10, 1),))
        interval = distance(self.zero, y, 4)
        self.assertEqual((interval.lower, interval.upper), (ZERO, Dyadic.pow2(-4)))

    def test_different_fills(self):
        interval = distance(self.zero, Configuration.constant(BINARY, 1), 3)
        self.assertEqual(interval.lower, Dyadic(7, 3))
        self.assertEqual(interval.upper, Dyadic(1))
        self.assertIsNone(difference_support(self.zero, Configuration.constant(BINARY, 1)))

    def test_enumeration_moves_weights(self):
        y = Configuration(BINARY, ((2, 1),))
        interval = distance(self.zero, y, 4, Enumeration.from_order([2, 1]))
        self.assertEqual(interval.lower, Dyadic.pow2(-1))
        self.assertTrue(interval.is_exact)

    def test_alphabet_mismatch(self):
        with self.assertRaises(AlphabetMismatch):
            distance(self.zero, Configuration.constant(Alphabet(3), 0), 4)
        with self.assertRaises(InvariantViolation):
            distance(self.zero, self.zero, 0)

    def test_interval_invariants(self):
        with self.assertRaises(InvariantViolation):
            DistanceInterval(Dyadic.pow2(-1), Dyadic.pow2(-2), 4)
        with self.assertRaises(InvariantViolation):
            DistanceInterval(ZERO, Dyadic.pow2(-1), 4)
        interval = DistanceInterval(ZERO, Dyadic.pow2(-4), 4)
        self.assertTrue(interval.contains(Dyadic.pow2(-5)))
        self.assertEqual(
            interval.to_json(),
            {
                "lower": {"num": 0, "den_pow2": 0},
                "upper": {"num": 1, "den_pow2": 4},
                "truncation_depth": 4,
            },
        )


class TestDistanceProperties(unittest.TestCase):
    @settings(max_examples=100, deadline=None)
    @given(
        ternary_configurations(),
        ternary_configurations(),
        st.integers(1, 16),
        st.integers(0, 2**32 - 1),
        st.integers(0, 8),
    )
    def test_symmetric(self, x, y, depth, seed, t):
        self.assertEqual(distance(x, y, depth), distance(y, x, depth))
        spec = random_map(np.random.default_rng(seed), "sample").spec
        self.assertEqual(orbit_distance(spec, x, y, t, depth), orbit_distance(spec, y, x, t, depth))

    @settings(max_examples=100, deadline=None)
    @given(
        ternary_configurations(),
        ternary_configurations(),
        ternary_configurations(),
        st.integers(1, 16),
    )
    def test_triangle_inequality_on_bounds(self, x, y, z, depth):
        xy, yz, xz = distance(x, y, depth), distance(y, z, depth), distance(x, z, depth)
        self.assertLessEqual(xz.lower, xy.lower + yz.lower)
        self.assertLessEqual(xz.upper, xy.upper + yz.upper)

    @settings(max_examples=100, deadline=None)
    @given(
        ternary_configurations(),
        ternary_configurations(),
        st.integers(1, 16),
        st.integers(0, 8),
    )
    def test_refines_with_depth(self, x, y, depth, extra):
        coarse, fine = distance(x, y, depth), distance(x, y, depth + extra)
        self.assertLessEqual(coarse.lower, fine.lower)
        self.assertLessEqual(fine.upper, coarse.upper)


class TestOrbitDistance(unittest.TestCase):
    def setUp(self):
        self.zero = Configuration.constant(BINARY, 0)
        self.y = Configuration(BINARY, ((4, 1),))

    def test_differences_travel_towards_the_front(self):
        expected = [Dyadic.pow2(-4), Dyadic.pow2(-2), Dyadic.pow2(-1), ZERO, ZERO]
        for t, value in enumerate(expected):
            with self.subTest(t=t):
                interval = orbit_distance(PHI1, self.zero, self.y, t, 8)
                self.assertTrue(interval.is_exact)
                self.assertEqual(interval.lower, value)

    def test_shifted_coordinate(self):
        self.assertEqual(shifted_coordinate(PHI1, self.y, 2, 1), 1)
        self.assertEqual(shifted_coordinate(PHI1, self.y, 1, 2), 1)
        self.assertEqual(shifted_coordinate(PHI1, self.y, 3, 1), 0)

    def test_incremental_series_matches_direct_evaluation(self):
        y = Configuration(
            BINARY, ((1, 1), (5, 1)), OrbitMarked(PHI2, 1, BlockSchedule(), Constant(0))
        )
        pairs = [(self.zero, self.y), (self.zero, y)]
        for spec in (PHI1, PHI2):
            for x, other in pairs:
                series = list(iter_orbit_distances(spec, x, other, 12, 6))
                for t, interval in series:
                    with self.subTest(spec=spec.describe(), t=t):
                        self.assertEqual(interval, orbit_distance(spec, x, other, t, 6))

    def test_intervals_contain_the_true_distance(self):
        y = Configuration(BINARY, ((1, 1), (4, 1)))
        for t in range(6):
            # only indices n <= 4 can reach the differing coordinates under doubling
            true_value = sum(
                (
                    Fraction(1, 2**n)
                    for n in range(1, 65)
                    if self.zero[iterate(PHI1, n, t)] != y[iterate(PHI1, n, t)]
                ),
                Fraction(0),
            )
            for depth in (2, 3, 8):
                with self.subTest(t=t, depth=depth):
                    interval = orbit_distance(PHI1, self.zero, y, t, depth)
                    self.assertTrue(interval.contains(Dyadic.from_fraction(true_value)))


class TestShiftConfiguration(unittest.TestCase):
    def test_doubling(self):
        x = Configuration(BINARY, ((4, 1),))
        self.assertEqual(shift_configuration(PHI1, x), Configuration(BINARY, ((2, 1),)))

    def test_constant_tail(self):
        spec = MapSpec.build(0, 3)
        x = Configuration(BINARY, ((3, 1),))
        self.assertEqual(shift_configuration(spec, x), Configuration.constant(BINARY, 1))

    def test_matches_shifted_coordinates(self):
        x = Configuration(BINARY, ((1, 1), (3, 1), (6, 1)))
        shifted = shift_configuration(PHI2, x)
        for n in range(1, 30):
            with self.subTest(n=n):
                self.assertEqual(shifted[n], shifted_coordinate(PHI2, x, n, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), ternary_configurations(fill=st.builds(Constant, symbols)))
    def test_materialized_orbit_matches_shifted_coordinates(self, seed, x):
        spec = random_map(np.random.default_rng(seed), "sample").spec
        shifted = x
        for t in range(13):
            for n in range(1, 13):
                self.assertEqual(
                    shifted[n], shifted_coordinate(spec, x, n, t), msg=f"t={t}, n={n}"
                )
            shifted = shift_configuration(spec, shifted)

    def test_requires_constant_fill(self):
        with self.assertRaises(NotMaterializable):
            shift_configuration(PHI1, Configuration(BINARY, fill=Periodic((0, 1))))


if __name__ == "__main__":
    unittest.main()
