"""Key-set tracking: constraints, intersections, forgery search."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wcauth
from wcauth import (
    KeySet,
    certain_forgery,
    constraint_set,
    craft_influenced_message,
    forgeable_messages,
    intersect,
    partition_by_message,
    random_elimination,
)
from wcauth.errors import DomainError, FamilyMismatchError


def brute_constraint(family, message, tag):
    """Independent enumeration of keys consistent with one observation."""
    return sorted(
        k for k in range(family.num_keys)
        if family.eval_tag(k, message) == tag
    )


class TestConstraintSets:
    def test_every_cell_has_keys_per_tag(self, affine5):
        for m in range(5):
            for t in range(5):
                ks = constraint_set(affine5, m, t)
                assert ks.size == affine5.keys_per_tag == 5
                assert ks.to_json() == brute_constraint(affine5, m, t)

    def test_two_observations_pin_the_key(self, affine5):
        # a*2+b=3 and a*1+b=1 solve to a=2, b=4, key 2*5+4=14
        joint = intersect(
            constraint_set(affine5, 2, 3), constraint_set(affine5, 1, 1)
        )
        assert joint.to_json() == [14]
        assert affine5.eval_tag(14, 2) == 3 and affine5.eval_tag(14, 1) == 1

    def test_intersect_requires_same_family(self, affine5, affine7):
        with pytest.raises(FamilyMismatchError):
            intersect(KeySet.full(affine5), KeySet.full(affine7))

    @given(st.integers(0, 6), st.integers(0, 6))
    @settings(max_examples=40)
    def test_constraint_matches_enumeration(self, m1, t1):
        fam = wcauth.build_affine_family(7)
        ks = constraint_set(fam, m1, t1)
        assert ks.to_json() == brute_constraint(fam, m1, t1)


class TestKeySet:
    def test_round_trip_and_membership(self, affine5):
        ks = KeySet.from_indices(affine5, [3, 14, 7])
        assert ks.to_json() == [3, 7, 14]
        assert 14 in ks and 4 not in ks
        assert KeySet.from_json(affine5, ks.to_json()) == ks
        assert list(ks.indices()) == [3, 7, 14]

    def test_full(self, affine5):
        assert KeySet.full(affine5).size == 25

    def test_out_of_range_rejected(self, affine5):
        with pytest.raises(DomainError):
            KeySet.from_indices(affine5, [25])
        with pytest.raises(DomainError):
            KeySet.from_indices(affine5, [-1])


class TestRandomElimination:
    def test_size_and_membership(self, affine5, rng):
        for true_key in (0, 13, 24):
            ks = random_elimination(affine5, true_key, Fraction(3, 5), rng)
            assert ks.size == 15  # round(0.6 * 25)
            assert true_key in ks

    def test_r_one_keeps_everything(self, affine5, rng):
        ks = random_elimination(affine5, 7, 1, rng)
        assert ks.size == 25

    def test_bankers_rounding_of_surviving_count(self, affine5, rng):
        # 25 * 1/10 = 2.5 rounds to the even 2
        assert random_elimination(affine5, 3, Fraction(1, 10), rng).size == 2
        # 25 * 3/10 = 7.5 rounds to the even 8
        assert random_elimination(affine5, 3, Fraction(3, 10), rng).size == 8

    def test_empty_survivor_set_rejected(self, affine5, rng):
        with pytest.raises(DomainError):
            random_elimination(affine5, 0, Fraction(1, 100), rng)

    def test_r_out_of_range(self, affine5, rng):
        with pytest.raises(DomainError):
            random_elimination(affine5, 0, Fraction(3, 2), rng)
        with pytest.raises(DomainError):
            random_elimination(affine5, 0, 0, rng)

    def test_deterministic_under_seed(self, affine5):
        draws = []
        for _ in range(2):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(9)))
            draws.append(random_elimination(affine5, 4, "3/5", rng).to_json())
        assert draws[0] == draws[1]

    def test_uniform_over_other_keys(self, affine5):
        # every non-true key should appear in roughly r*N draws
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(31)))
        counts = np.zeros(25, dtype=int)
        n = 2000
        for _ in range(n):
            counts[random_elimination(affine5, 0, "3/5", rng).indices()] += 1
        assert counts[0] == n
        others = counts[1:] / n
        expected = 14 / 24  # 14 of the 24 non-true keys survive
        assert np.all(np.abs(others - expected) < 5 * np.sqrt(expected * (1 - expected) / n))


class TestCertainForgery:
    def test_worked_example(self, affine5):
        # keys 6=(1,1) and 11=(2,1): tags at m=0 are both 1, at m=1 differ
        ks = KeySet.from_indices(affine5, [6, 11])
        assert certain_forgery(ks, 0) == 1
        assert certain_forgery(ks, 1) is None
        assert forgeable_messages(ks) == [(0, 1)]
        assert forgeable_messages(ks, exclude_message=0) == []

    def test_singleton_forges_everywhere(self, affine5):
        ks = KeySet.from_indices(affine5, [14])
        assert len(forgeable_messages(ks)) == 5
        for m, t in forgeable_messages(ks):
            assert affine5.eval_tag(14, m) == t

    def test_empty_set_rejected(self, affine5):
        empty = KeySet.from_indices(affine5, [])
        with pytest.raises(DomainError):
            certain_forgery(empty, 0)


class TestPartition:
    def test_full_set_has_no_good_classes(self, affine5):
        prof = partition_by_message(KeySet.full(affine5), 0)
        assert prof.subset_sizes == {t: 5 for t in range(5)}
        assert prof.good_tags == ()
        assert prof.good_key_count == 0
        assert prof.total == 25

    def test_three_survivors_split_into_singletons(self, affine5):
        # keys (1,1), (2,1), (3,2): at m=1 tags are 2, 3, 0: all certain
        ks = KeySet.from_indices(affine5, [6, 11, 17])
        prof = partition_by_message(ks, 1)
        assert prof.good_key_count == 3
        assert sorted(prof.good_tags) == [0, 2, 3]
        assert prof.total == 3


class TestCrafting:
    def test_worked_example_matches_enumeration(self, affine5):
        ks = wcauth.KeySet.from_indices(affine5, [6, 11, 17])
        cap = affine5.forgery_cell_cap()  # 1

        masses = []
        for m in range(5):
            tags = [affine5.eval_tag(k, m) for k in ks.to_json()]
            good = sum(
                tags.count(t) for t in set(tags)
                if 1 <= tags.count(t) <= cap
            )
            masses.append(good)
        assert masses == [1, 3, 1, 3, 1]

        best = max(range(5), key=lambda m: (masses[m], -m))
        assert best == 1
        assert craft_influenced_message(ks) == 1

    def test_exclusion_moves_to_next_best(self, affine5):
        ks = wcauth.KeySet.from_indices(affine5, [6, 11, 17])
        assert craft_influenced_message(ks, exclude=frozenset({1})) == 3

    def test_no_gain_returns_none(self, affine5):
        # the full key set has no class at or below the cap anywhere
        assert craft_influenced_message(KeySet.full(affine5)) is None

    @given(st.sets(st.integers(0, 24), min_size=1, max_size=6))
    @settings(max_examples=50)
    def test_crafted_message_maximizes_good_mass(self, indices):
        fam = wcauth.build_affine_family(5)
        ks = KeySet.from_indices(fam, indices)
        choice = craft_influenced_message(ks)
        cap = fam.forgery_cell_cap()

        def mass(m):
            tags = [fam.eval_tag(k, m) for k in indices]
            return sum(
                tags.count(t) for t in set(tags)
                if 1 <= tags.count(t) <= cap
            )

        best = max(mass(m) for m in range(5))
        if choice is None:
            assert best == 0
        else:
            assert mass(choice) == best > 0
