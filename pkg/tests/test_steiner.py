"""Steiner system constructions against the pair-coverage definition and the
backtracking search as an independent oracle."""

from __future__ import annotations

from itertools import combinations
from math import comb

import pytest

from minorforge.errors import InfeasibleError, UnsupportedParametersError
from minorforge.steiner import (
    SteinerSystem,
    _backtrack,
    admissible,
    build_steiner,
    validate_steiner,
)


def brute_pair_coverage(system: SteinerSystem) -> dict[tuple[int, int], int]:
    cover: dict[tuple[int, int], int] = {
        p: 0 for p in combinations(range(1, system.k + 1), 2)
    }
    for block in system.blocks:
        for pair in combinations(sorted(block), 2):
            cover[pair] += 1
    return cover


def test_single_block_system():
    ss = build_steiner(3, 3)
    assert ss.sorted_blocks == ((1, 2, 3),)


def test_fano_plane():
    ss = build_steiner(7, 3)
    assert ss.r == 7
    assert validate_steiner(ss)
    assert all(v == 1 for v in brute_pair_coverage(ss).values())


def test_nine_points_has_twelve_blocks():
    ss = build_steiner(9, 3)
    assert ss.r == 12
    oracle = _backtrack(9, 3)
    assert oracle is not None and len(oracle) == 12


@pytest.mark.parametrize("k", [3, 7, 9, 13, 15, 19, 21, 25, 27])
def test_triple_systems(k):
    ss = build_steiner(k, 3)
    assert ss.r == comb(k, 2) // 3
    assert validate_steiner(ss)
    # replication: every element sits in (k-1)/2 blocks
    assert all(ss.replication(x) == (k - 1) // 2 for x in range(1, k + 1))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_affine_planes(q):
    ss = build_steiner(q * q, q)
    assert ss.r == q * (q + 1)
    assert validate_steiner(ss)


def test_blocks_intersect_in_at_most_one_element():
    for ss in (build_steiner(7, 3), build_steiner(13, 3), build_steiner(16, 4)):
        for b1, b2 in combinations(ss.blocks, 2):
            assert len(b1 & b2) <= 1


def test_construction_matches_backtracking_oracle_validity():
    for k, s in ((7, 3), (13, 3), (9, 3)):
        built = build_steiner(k, s)
        oracle = _backtrack(k, s)
        assert oracle is not None
        assert len(oracle) == built.r
        assert validate_steiner(SteinerSystem(k, s, tuple(oracle)))


def test_validate_rejects_missing_block():
    ss = build_steiner(7, 3)
    broken = SteinerSystem(7, 3, ss.blocks[1:])
    assert not validate_steiner(broken)


def test_validate_rejects_double_cover():
    bad = SteinerSystem(
        4, 3, (frozenset((1, 2, 3)), frozenset((1, 2, 4)))
    )
    assert not validate_steiner(bad)


def test_divisibility_failure_is_infeasible():
    with pytest.raises(InfeasibleError):
        build_steiner(8, 3)  # 8 = 2 (mod 6)


def test_unsupported_parameters():
    with pytest.raises(UnsupportedParametersError):
        build_steiner(37, 4)  # admissible arithmetic but k > backtrack cap, k != s^2


def test_backtracking_finds_projective_plane():
    # (13,4) is admissible and exists (13 lines of PG(2,3)); only the
    # backtracking construction applies.
    ss = build_steiner(13, 4)
    assert ss.r == 13
    assert validate_steiner(ss)


def test_backtracking_proves_infeasibility():
    # (16,6) passes both divisibility conditions but violates Fisher's
    # inequality (8 blocks < 16 points); the search must exhaust.
    assert not admissible(6, 3)
    assert admissible(16, 6)
    with pytest.raises(InfeasibleError):
        build_steiner(16, 6)


def test_pair_system():
    ss = build_steiner(5, 2)
    assert ss.r == comb(5, 2)
    assert validate_steiner(ss)
