import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_min_norm
from realstrata.candidates import (
    CandidateBudgetError,
    confirm_candidates,
    enumerate_candidates,
    extract_weights,
    hull_residual,
    min_norm_point,
)
from realstrata.lie_core import preset


def test_min_norm_point_segment():
    x, c = min_norm_point([(2, 1), (1, 2), (3, 3)])
    assert np.allclose(x, [1.5, 1.5])
    assert np.allclose(c, [0.5, 0.5, 0.0])
    assert np.allclose(x, grid_min_norm(np.array([(2, 1), (1, 2), (3, 3)], float)), atol=1e-6)


def test_min_norm_point_origin_inside():
    x, c = min_norm_point([(1, 0), (-1, 1), (-1, -1)])
    assert np.allclose(x, 0, atol=1e-12)
    assert np.isclose(c.sum(), 1) and (c >= 0).all()


def test_min_norm_point_single():
    x, c = min_norm_point([(3.0, -4.0)])
    assert np.allclose(x, [3, -4]) and np.allclose(c, [1])


point_sets = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda d: st.lists(st.lists(st.floats(-3, 3), min_size=d, max_size=d), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(point_sets)
def test_min_norm_point_optimality_certificate(pts):
    """x is in the hull and <x, w - x> >= 0 for every input w."""
    p = np.array(pts, dtype=float)
    x, c = min_norm_point(p)
    scale = max(1.0, float(np.abs(p).max()) ** 2)
    assert np.isclose(c.sum(), 1.0) and (c >= -1e-12).all()
    assert np.allclose(c @ p, x)
    assert (p @ x - x @ x >= -1e-9 * scale).all()
    support = p[c > 0]
    if len(support) > 1:
        # affinely independent support
        diffs = support[1:] - support[0]
        assert np.linalg.matrix_rank(diffs, tol=1e-9) == len(support) - 1


def test_hull_residual():
    tri = np.array([[0, 0], [1, 0], [0, 1]], float)
    assert hull_residual(tri, [0.2, 0.2]) < 1e-12
    assert np.isclose(hull_residual(tri, [1, 1]), 1.0)


def test_sl3r_weights_form_a_triangle():
    spec = preset("sl3r")
    t = extract_weights(spec)
    assert len(t) == 3 and t.multiplicities == (1, 1, 1)
    assert np.allclose(np.linalg.norm(t.weights, axis=1), np.sqrt(2 / 3))
    assert np.allclose(t.weights.sum(axis=0), 0, atol=1e-12)


@pytest.mark.parametrize(
    "name,norms",
    [
        ("sl2r", [0.0, 1 / np.sqrt(2)]),
        ("sl2c", [0.0, 1 / np.sqrt(2)]),
        ("sl3r", [0.0, 1 / np.sqrt(6), np.sqrt(6) / 3]),
        ("sl3c", [0.0, 1 / np.sqrt(6), np.sqrt(6) / 3]),
    ],
)
def test_candidate_norms(name, norms, candidates):
    got = [c.norm for c in candidates[name]]
    assert np.allclose(got, norms, atol=1e-12)
    assert got == sorted(got)


def test_sl3r_candidates_are_chamber_points(candidates):
    spec = preset("sl3r")
    mats = [np.real(np.diag(c.matrix(spec))) for c in candidates["sl3r"]]
    assert np.allclose(mats[1], [1 / 6, 1 / 6, -1 / 3])
    assert np.allclose(mats[2], [2 / 3, -1 / 3, -1 / 3])
    for m in mats:
        assert (np.diff(m) <= 1e-12).all()


def test_witness_reproduces_candidate(candidates):
    spec = preset("sl3r")
    table = extract_weights(spec)
    for c in candidates["sl3r"]:
        w = table.weights[list(c.support)]
        assert np.allclose(c.witness_coeffs @ w, c.beta, atol=1e-12)


def test_budget():
    spec = preset("sl3r")
    with pytest.raises(CandidateBudgetError):
        enumerate_candidates(spec, extract_weights(spec), budget=2)


def test_confirm(candidates):
    out = confirm_candidates(candidates["sl2r"], {1})
    assert [c.confirmed for c in out] == [False, True]


def test_grid_oracle_matches_full_enumeration():
    """The line-search shortcut in the grid oracle finds the exact grid minimum."""
    import itertools

    from oracles import _simplex_grid_min

    rng = np.random.default_rng(0)
    m = 12
    for _ in range(20):
        k = int(rng.integers(2, 5))
        p = rng.uniform(-2, 2, (k, int(rng.integers(1, 4))))
        g = p @ p.T
        grid = [np.array(c) / m for c in itertools.product(range(m + 1), repeat=k) if sum(c) == m]
        best = min(lam @ g @ lam for lam in grid)
        lam = _simplex_grid_min(g, 1 / m)
        assert abs(lam @ g @ lam - best) < 1e-12
