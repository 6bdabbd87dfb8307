import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings

from expmc.estimator import PathParams, vector_estimate
from expmc.graph import split
from expmc.oracle import (
    OracleCapError,
    commutator_bounds,
    commutator_lie,
    decompose_error,
    dense_expm,
    exact_action,
    splitting_product,
    tc_error_bound,
)

from conftest import complete, random_graph, ring, small_graphs


def test_expm_zero():
    np.testing.assert_array_equal(dense_expm(np.zeros((4, 4))), np.eye(4))


def test_expm_single_edge_closed_form():
    c, s = np.cosh(1.0), np.sinh(1.0)
    np.testing.assert_allclose(dense_expm([[0, 1], [1, 0]]), [[c, s], [s, c]], rtol=1e-12)


def test_expm_diagonal():
    d = np.array([-30.0, -1.0, 0.0, 0.5, 12.0])
    np.testing.assert_allclose(dense_expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14)


@pytest.mark.parametrize("scale", [1e-3, 0.1, 1.0, 5.0, 40.0])
def test_expm_matches_scipy(scale):
    rng = np.random.default_rng(int(scale * 1000))
    a = rng.normal(size=(12, 12)) * scale / 4
    np.testing.assert_allclose(dense_expm(a), scipy.linalg.expm(a), rtol=1e-11, atol=0)


@given(small_graphs())
@settings(max_examples=40, deadline=None)
def test_expm_adjacency_symmetric_positive(a):
    x = a.to_dense()
    e = dense_expm(x)
    np.testing.assert_allclose(e, e.T, rtol=1e-12, atol=1e-300)
    assert np.all(np.diag(e) > 0)
    np.testing.assert_allclose(e, scipy.linalg.expm(x), rtol=1e-10, atol=1e-12)


def test_expm_shape_errors():
    with pytest.raises(ValueError):
        dense_expm(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        dense_expm([[np.nan]])


def test_cap_from_environment(monkeypatch):
    m = split(ring(6))
    monkeypatch.setenv("EXPMC_ORACLE_CAP", "5")
    for call in (lambda: exact_action(m, np.ones(6), 1.0),
                 lambda: splitting_product(m, np.ones(6), PathParams(1.0, 2, 1)),
                 lambda: dense_expm(np.eye(6))):
        with pytest.raises(OracleCapError, match="cap 5"):
            call()
    monkeypatch.setenv("EXPMC_ORACLE_CAP", "6")
    assert exact_action(m, np.ones(6), 1.0).shape == (6,)


def test_splitting_one_step_no_diagonal():
    # with D = 0 both products collapse to exp(-dt L) v
    m = split(random_graph(np.random.default_rng(1), 5, weighted=True))
    lap = m.laplacian().toarray()
    d = m.d.copy()
    # make D vanish by moving each degree onto the diagonal with the opposite sign
    from conftest import edge_graph
    a = m.reassemble()
    rows, cols, w = list(a.rows), list(a.cols), list(a.weights)
    z = edge_graph(5, list(zip(rows, cols)), w, diag=-d)
    mz = split(z)
    assert np.allclose(mz.d, 0)
    v = np.arange(5.0)
    for s in ("lie", "strang"):
        got = splitting_product(mz, v, PathParams(0.3, 1, 1, s))
        np.testing.assert_allclose(got, scipy.linalg.expm(-0.3 * lap) @ v, rtol=1e-12)


@pytest.mark.parametrize("a", [ring(40), ring(15, 3), complete(6)], ids=["C40", "ring15k3", "K6"])
@pytest.mark.parametrize("splitting", ["lie", "strang"])
def test_splitting_exact_on_regular_graphs(a, splitting):
    m = split(a)
    v = np.random.default_rng(2).uniform(-1, 1, m.n)
    truth = scipy.linalg.expm(a.to_dense()) @ v
    got = splitting_product(m, v, PathParams(1.0, 8, 1, splitting))
    assert np.abs(got - truth).max() < 1e-10 * np.abs(truth).max()


def test_strang_second_order_ratio():
    m = split(random_graph(np.random.default_rng(3), 10))
    truth = scipy.linalg.expm(m.adjacency().toarray()).sum()
    errs = [abs(splitting_product(m, np.ones(10), PathParams(1.0, n, 1, "strang")).sum() - truth)
            for n in (8, 16, 32, 64)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.6) & (ratios < 4.4)), ratios


def test_lie_first_order_ratio_on_entry():
    m = split(random_graph(np.random.default_rng(4), 10))
    e0 = np.eye(10)[0]
    truth = scipy.linalg.expm(m.adjacency().toarray())[0] @ np.ones(10)
    errs = [abs(splitting_product(m, np.ones(10), PathParams(1.0, n, 1, "lie"))[0] - truth)
            for n in (64, 128, 256)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 1.7) & (ratios < 2.3)), ratios
    assert e0[0] == 1


def test_commutator_zero_on_regular():
    for a in (ring(20), complete(5)):
        m = split(a)
        v = np.random.default_rng(5).normal(size=m.n)
        assert np.abs(commutator_lie(m, v)).max() < 1e-12
        b = commutator_bounds(m, 0.1, v)
        assert b.lie_local < 1e-12 and b.strang_local < 1e-12


def test_commutator_path3(path3):
    c = commutator_lie(path3, np.ones(3))
    np.testing.assert_allclose(c, [1.0, -2.0, 1.0])
    # L is symmetric with L1 = 0, so the commutator has no component along 1
    assert np.ones(3) @ c == 0.0


def test_tc_error_bound_formula():
    m = split(random_graph(np.random.default_rng(6), 9))
    assert tc_error_bound(m, 0.1) == pytest.approx(2 * m.dmax**3 * 0.01, rel=1e-14)
    truth = scipy.linalg.expm(m.adjacency().toarray()).sum()
    for n in (16, 32):
        p = PathParams(1.0, n, 1, "strang")
        err = abs(splitting_product(m, np.ones(9), p).sum() - truth)
        assert err <= tc_error_bound(m, p.dt) * m.n * np.exp(m.dmax)


def test_decompose_tiny_graph():
    m = split(random_graph(np.random.default_rng(7), 4))
    p = PathParams(1.0, 16, 10**7, "strang", seed=1)
    mc = vector_estimate(m, np.ones(4), p)
    dec = decompose_error(m, np.ones(4), p, mc)
    truth = exact_action(m, np.ones(4), 1.0)
    assert dec.eps_total == dec.eps_split + dec.eps_stat
    assert np.abs(mc.values - truth).max() <= dec.eps_total + 1e-15
    assert dec.eps_stat < 4 * mc.entry_std_errors.max()
    assert dec.norm == "inf"
    l1 = decompose_error(m, np.ones(4), p, mc, norm="l1")
    assert l1.eps_split >= dec.eps_split
    with pytest.raises(ValueError):
        decompose_error(m, np.ones(4), p, mc, norm="l2")


def test_decompose_dt_sweep_plateaus():
    m = split(random_graph(np.random.default_rng(8), 8))
    splits, stats_ = [], []
    for n in (2, 8, 32, 128):
        p = PathParams(1.0, n, 10**4, "strang", seed=2)
        dec = decompose_error(m, np.ones(8), p, vector_estimate(m, np.ones(8), p))
        splits.append(dec.eps_split)
        stats_.append(dec.eps_stat)
    assert all(a > b for a, b in zip(splits, splits[1:]))
    # at small dt the sampling part dominates
    assert splits[-1] < 0.05 * stats_[-1]
    assert splits[0] > stats_[0]


def test_decompose_regular_graph():
    m = split(ring(50))
    p = PathParams(1.0, 4, 10**4, "lie", seed=3)
    dec = decompose_error(m, np.ones(50), p, vector_estimate(m, np.ones(50), p))
    assert dec.eps_split < 1e-10
