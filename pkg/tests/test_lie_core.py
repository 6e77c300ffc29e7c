import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realstrata.lie_core import (
    GroupSpec,
    ad_decompose,
    bracket,
    chamber_representative,
    conj_limit,
    dump_spec,
    inner,
    load_spec,
    preset,
    spec_from_dict,
    spec_to_dict,
    spectral_chamber_coords,
    validate_group_spec,
    weyl_fold,
)

DIMS = {"sl2r": (1, 2, 1), "sl3r": (3, 5, 2), "sl2c": (3, 3, 1), "sl3c": (8, 8, 2)}


@pytest.mark.parametrize("name", sorted(DIMS))
def test_presets_validate(name):
    spec = preset(name)
    rep = validate_group_spec(spec)
    assert rep.ok, [c for c in rep.checks if not c.passed]
    assert (spec.dim_k, spec.dim_p, spec.dim_a) == DIMS[name]


def test_frames_are_orthonormal(specs):
    for spec in specs.values():
        for frame in (spec.k_frame, spec.p_frame, spec.a_frame):
            gram = np.array([[inner(a, b) for b in frame] for a in frame])
            assert np.allclose(gram, np.eye(len(frame)), atol=1e-12)


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("so3")
    with pytest.raises(KeyError):
        preset("sl1r")


def test_validation_detects_noncommuting_a():
    base = preset("sl2r")
    bad = GroupSpec("bad", 2, "real", base.k_basis, base.p_basis, base.p_basis, weyl="trivial")
    rep = validate_group_spec(bad)
    assert not rep.ok
    assert not rep["a_commutative"].passed


def test_validation_detects_non_hermitian_p():
    base = preset("sl2r")
    p = base.p_basis.copy()
    p[1] = np.array([[0, 1], [0, 0]], dtype=complex)
    rep = validate_group_spec(GroupSpec("bad", 2, "real", base.k_basis, p, base.a_basis))
    assert not rep["p_selfadjoint"].passed


def _ad_spectrum_oracle(beta_diag):
    """ad(diag(d)) acts on E_ij by d_i - d_j; the traceless condition removes one zero."""
    d = np.asarray(beta_diag, dtype=float)
    vals = [d[i] - d[j] for i in range(len(d)) for j in range(len(d))]
    vals.remove(0.0)
    return sorted(vals)


@pytest.mark.parametrize(
    "name,diag",
    [("sl2r", [1, -1]), ("sl3r", [2, -1, -1]), ("sl3r", [1, 0, -1]), ("sl3c", [2, -1, -1])],
)
def test_ad_decompose_matches_root_oracle(name, diag):
    spec = preset(name)
    beta = np.diag(diag).astype(complex)
    dec = ad_decompose(spec, beta)
    mult = 1 if spec.is_real else 2  # complex presets: real dimension doubles
    got = sorted(np.concatenate([np.full(len(s), lam) for lam, s in zip(dec.eigenvalues, dec.eigenspaces)]))
    want = sorted(np.repeat(_ad_spectrum_oracle(diag), mult))
    assert np.allclose(got, want, atol=1e-9)
    assert len(dec.zero_part) + len(dec.pos_part) == len(dec.nonneg_part)
    for m in dec.zero_part:
        assert np.linalg.norm(bracket(beta, m)) < 1e-9


def test_ad_decompose_sl3_centralizer():
    spec = preset("sl3r")
    dec = ad_decompose(spec, np.diag([2, -1, -1]).astype(complex))
    assert len(dec.zero_part) == 4
    assert len(dec.pos_part) == 2
    assert len(dec.k_beta) == 1
    assert len(dec.p_beta) == 3


def test_ad_decompose_rejects_non_p():
    spec = preset("sl2r")
    with pytest.raises(ValueError):
        ad_decompose(spec, spec.k_basis[0])


def test_conj_limit_unipotent():
    spec = preset("sl2r")
    beta = np.diag([1.0, -1.0]).astype(complex)
    # entry (1, 2) scales by exp(2t) and dies as t -> -infinity
    lim = conj_limit(spec, beta, np.array([[1, 1], [0, 1]]))
    assert lim.converged and np.allclose(lim.limit, np.eye(2), atol=1e-9)
    div = conj_limit(spec, beta, np.array([[1, 0], [1, 1]]))
    assert not div.converged and div.diverged_at is not None


def test_weyl_fold_sorts_spectrum():
    spec = preset("sl3r")
    v = spec.a_coords(np.diag([-1.0, 3.0, -2.0]).astype(complex))
    rep, w = weyl_fold(spec, v)
    assert np.allclose(np.diag(spec.a_matrix(rep)).real, [3, -1, -2])
    assert np.allclose(w(v), rep)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_weyl_fold_idempotent_and_isometric(c):
    spec = preset("sl3r")
    v = np.array(c)
    r1 = chamber_representative(spec, v).chamber_rep
    r2 = chamber_representative(spec, r1).chamber_rep
    assert np.allclose(r1, r2)
    assert np.isclose(np.linalg.norm(r1), np.linalg.norm(v))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_spectral_chamber_coords_k_invariant(seed):
    from scipy.linalg import expm

    spec = preset("sl3r")
    rng = np.random.default_rng(seed)
    x = spec.p_matrix(rng.standard_normal(spec.dim_p))
    k = expm(np.tensordot(rng.standard_normal(spec.dim_k), spec.k_frame, axes=1))
    assert np.allclose(spectral_chamber_coords(spec, x), spectral_chamber_coords(spec, k @ x @ k.conj().T), atol=1e-10)


def test_spec_roundtrip(tmp_path, specs):
    for spec in specs.values():
        again = spec_from_dict(spec_to_dict(spec))
        assert np.allclose(again.p_basis, spec.p_basis)
        path = tmp_path / f"{spec.name}.json"
        dump_spec(spec, path)
        loaded = load_spec(path)
        assert loaded.name == spec.name and validate_group_spec(loaded).ok
