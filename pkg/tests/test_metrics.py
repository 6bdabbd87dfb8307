import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from expmc.generators import GenSpec, generate
from expmc.graph import GraphStats, split, stats
from expmc.metrics import BetaRule, RankedVector, isim, normalized_tc, rank, resolve_beta

from conftest import complete


def brute_isim(x_order, y_order, K):
    total = 0.0
    for i in range(1, K + 1):
        total += len(set(x_order[:i]) ^ set(y_order[:i])) / (2 * i)
    return total / K


def _ranked(order):
    order = np.asarray(order)
    scores = np.empty(order.size)
    scores[order] = np.arange(order.size, 0, -1, dtype=float)
    return RankedVector(scores, order)


def test_isim_identical():
    x = rank([0.3, 0.9, 0.1, 0.5])
    assert isim(x, x) == 0.0


def test_isim_disjoint_prefixes():
    x = _ranked([0, 1, 2, 3, 4, 5])
    y = _ranked([3, 4, 5, 0, 1, 2])
    assert isim(x, y, top_fraction=0.5) == pytest.approx(1.0, abs=1e-15)


def test_isim_swapped_leaders():
    a, b, c = 0, 1, 2
    assert isim(_ranked([a, b, c]), _ranked([b, a, c])) == pytest.approx(1 / 3, abs=1e-15)


def test_isim_length_mismatch():
    with pytest.raises(ValueError):
        isim(rank([1, 2]), rank([1, 2, 3]))
    with pytest.raises(ValueError):
        isim(rank([1, 2]), rank([1, 2]), top_fraction=0.0)


def test_isim_top_fraction_k():
    rng = np.random.default_rng(0)
    x, y = rank(rng.random(50)), rank(rng.random(50))
    for frac, K in [(0.1, 5), (0.25, 13), (1.0, 50), (0.01, 1)]:
        assert isim(x, y, frac) == pytest.approx(brute_isim(x.order, y.order, K), abs=1e-14)


perms = st.integers(1, 40).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))


@given(perms, st.floats(0.01, 1.0))
@settings(max_examples=100, deadline=None)
def test_isim_properties(pair, frac):
    x, y = _ranked(pair[0]), _ranked(pair[1])
    v = isim(x, y, frac)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(isim(y, x, frac), abs=1e-14)
    K = max(1, math.ceil(frac * len(pair[0]) - 1e-9))
    assert v == pytest.approx(brute_isim(pair[0], pair[1], K), abs=1e-12)
    assert isim(x, x, frac) == 0.0


ints = st.lists(st.integers(-1000, 1000), min_size=1, max_size=30)


@given(ints, ints)
@settings(max_examples=60, deadline=None)
def test_isim_monotone_rescaling(a, b):
    n = min(len(a), len(b))
    a, b = np.array(a[:n], dtype=float), np.array(b[:n], dtype=float)
    base = isim(rank(a), rank(b))
    # maps that are strictly increasing and exact in floating point on small integers
    assert isim(rank(a**3 + a), rank(3 * b + 7)) == pytest.approx(base, abs=1e-14)


def test_rank_examples():
    np.testing.assert_array_equal(rank([5.0, 4.0, 1.0]).order, [0, 1, 2])
    np.testing.assert_array_equal(rank([1.0, 2.0, 3.0]).order, [2, 1, 0])
    np.testing.assert_array_equal(rank(np.full(6, 2.5)).order, np.arange(6))
    np.testing.assert_array_equal(rank([1.0, 3.0, 1.0, 3.0]).order, [1, 3, 0, 2])


@given(st.lists(st.integers(-3, 3).map(float), min_size=1, max_size=40))
def test_rank_invariants(vals):
    r = rank(vals)
    assert sorted(r.order.tolist()) == list(range(len(vals)))
    s = np.asarray(vals)[r.order]
    assert np.all(np.diff(s) <= 0)
    for t in range(len(vals) - 1):
        if s[t] == s[t + 1]:
            assert r.order[t] < r.order[t + 1]


def test_rank_nan():
    with pytest.raises(ValueError):
        rank([1.0, np.nan])


def test_normalized_tc():
    assert normalized_tc(7.0, 7) == 1.0
    assert normalized_tc(2 * np.e, 2) == np.e
    with pytest.raises(ValueError):
        normalized_tc(1.0, 0)


def _st(lmax, dmax):
    return GraphStats(n=1, n_edges=1, dbar=1.0, dmax=dmax, lambda_max=lmax,
                      lambda_rel_change=0.0, power_iters=1)


def test_resolve_beta_k4():
    s = stats(split(complete(4)), 100)
    assert resolve_beta(BetaRule("lmax"), s) == pytest.approx(1 / 3, rel=1e-12)
    assert resolve_beta(BetaRule("dmax"), s) == pytest.approx(1 / 3, rel=1e-15)


def test_resolve_beta_scale_free_1000():
    s = _st(10.22, 69)
    assert resolve_beta(BetaRule("lmax"), s) == pytest.approx(0.0979, abs=1e-4)
    assert resolve_beta(BetaRule("dmax"), s) == pytest.approx(0.0145, abs=1e-4)


@pytest.mark.parametrize("lmax,dmax", [(10.22, 69), (19.52, 357)])
def test_resolve_beta_reciprocals(lmax, dmax):
    s = _st(lmax, dmax)
    assert resolve_beta(BetaRule("lmax"), s) == 1 / lmax
    assert resolve_beta(BetaRule("dmax"), s) == 1 / dmax
    assert resolve_beta(BetaRule("dmax"), s) <= resolve_beta(BetaRule("lmax"), s)


def test_resolve_beta_errors():
    with pytest.raises(ValueError):
        resolve_beta(BetaRule("lmax"), _st(None, 3))
    with pytest.raises(ValueError):
        BetaRule("fixed", -1.0)
    with pytest.raises(ValueError):
        BetaRule("median")
    assert resolve_beta(BetaRule("fixed", 0.5), _st(None, 3)) == 0.5


def test_scale_free_tcn_finite_at_inverse_dmax():
    m = split(generate(GenSpec("scalefree", 1000, seed=0)))
    a = m.adjacency().toarray()
    tcn = normalized_tc(scipy.linalg.expm(a / m.dmax).sum(), m.n)
    assert np.isfinite(tcn) and 1.0 < tcn < 10.0
