import itertools
import random
from fractions import Fraction

import pytest

from transversal.errors import ShapeError
from transversal.kmatching import (
    greedy_rainbow_kgraph_matching,
    max_hypothesis_eps,
    verify_rainbow_kgraph_matching,
)


def dense_instance(n: int, k: int, t: int, seed: int, p: float = 0.6, targets: int = 3):
    rng = random.Random(seed)
    all_edges = list(itertools.permutations(range(n), k))
    hs = [[e for e in all_edges if rng.random() < p] for _ in range(t)]
    Z = []
    for _ in range(targets):
        chosen = rng.sample(range(t), max(1, t // 2))
        Z.append([(i, e) for i in chosen for e in hs[i] if rng.random() < 0.7])
    return hs, Z


@pytest.mark.parametrize("n,k,t", [(12, 2, 6), (16, 2, 8)])
def test_greedy_matching_meets_conclusions(n, k, t):
    hs, Z = dense_instance(n, k, t, seed=n)
    eps = max_hypothesis_eps(n, k, hs, Z)
    assert eps > 0
    M = greedy_rainbow_kgraph_matching(n, k, hs, Z, seed=1)
    rep = verify_rainbow_kgraph_matching(n, k, hs, Z, M, eps, t)
    assert rep.hypotheses_ok and rep.conclusions_ok, rep
    assert rep.failing_side is None


def test_three_uniform_instance_cannot_fit_four_edges():
    # four vertex-disjoint 3-edges need 12 vertices; only 10 exist
    n, k, t = 10, 3, 4
    hs, Z = dense_instance(n, k, t, seed=3)
    eps = max_hypothesis_eps(n, k, hs, Z)
    M = greedy_rainbow_kgraph_matching(n, k, hs, Z, seed=1)
    rep = verify_rainbow_kgraph_matching(n, k, hs, Z, M, eps, t)
    assert rep.hypotheses_ok and rep.matching_valid
    assert rep.size == 3 and rep.size < rep.size_bound
    assert rep.failing_side == "conclusions"


def test_degenerate_thresholds():
    n, k, t = 2, 2, 4
    full = [(0, 1), (1, 0)]
    rep = verify_rainbow_kgraph_matching(n, k, [full] * t, [[(0, (0, 1))]], {0: (0, 1)}, 1, t)
    assert rep.size_bound == 3
    assert rep.coverage_bound == 1
    assert rep.edge_bound == 4


def test_empty_matching_fails_size():
    hs, Z = dense_instance(8, 2, 4, seed=0)
    rep = verify_rainbow_kgraph_matching(8, 2, hs, Z, {}, Fraction(1, 10))
    assert not rep.conclusions_ok and rep.size == 0


def test_invalid_matching_reported():
    hs = [[(0, 1)], [(1, 2)]]
    rep = verify_rainbow_kgraph_matching(3, 2, hs, [], {0: (0, 1), 1: (1, 2)}, Fraction(1, 9))
    assert not rep.matching_valid
    assert any("shares vertices" in p for p in rep.problems)


def test_shape_errors():
    with pytest.raises(ShapeError):
        verify_rainbow_kgraph_matching(3, 2, [[(0, 1, 2)]], [], {}, Fraction(1, 2))
    with pytest.raises(ShapeError):
        verify_rainbow_kgraph_matching(3, 2, [[(0, 1)]], [[(5, (0, 1))]], {}, Fraction(1, 2))


def test_greedy_is_deterministic():
    hs, Z = dense_instance(12, 2, 6, seed=5)
    assert greedy_rainbow_kgraph_matching(12, 2, hs, Z, seed=9) == greedy_rainbow_kgraph_matching(12, 2, hs, Z, seed=9)
