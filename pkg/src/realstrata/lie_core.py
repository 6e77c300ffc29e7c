"""Compatible real reductive matrix groups G = K exp(p) inside SL(n, C).

A group is described by real bases of its Cartan pieces: ``k`` (anti-Hermitian
matrices), ``p`` (Hermitian matrices) and a maximal abelian ``a`` inside ``p``.
All inner products are the trace form ``<X, Y> = Re tr(X Y^*)``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "GroupSpec",
    "GroupSpecError",
    "ValidationCheck",
    "ValidationReport",
    "AdEigenDecomposition",
    "ConjugationLimit",
    "WeylOrbitRep",
    "inner",
    "bracket",
    "orthonormalize",
    "validate_group_spec",
    "ad_decompose",
    "conj_limit",
    "chamber_representative",
    "weyl_fold",
    "spectral_chamber_coords",
    "sl_real",
    "sl_complex",
    "preset",
    "PRESETS",
    "spec_to_dict",
    "spec_from_dict",
    "dump_spec",
    "load_spec",
]


class GroupSpecError(ValueError):
    """Structural problem with a group description (shapes, missing data)."""


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Trace form Re tr(x y^*)."""
    return float(np.real(np.vdot(y, x)))


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def _as_stack(mats: Sequence[np.ndarray] | np.ndarray, n: int) -> np.ndarray:
    if len(mats) == 0:
        return np.zeros((0, n, n), dtype=complex)
    return np.asarray(np.stack([np.asarray(m, dtype=complex) for m in mats]), dtype=complex)


def orthonormalize(mats: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Modified Gram-Schmidt for the trace form, dropping dependent members.

    An input that is already orthonormal is returned unchanged up to rounding,
    so coordinates in the result agree with coordinates in the input.
    """
    out: list[np.ndarray] = []
    for m in mats:
        v = np.array(m, dtype=complex)
        scale = np.linalg.norm(v)
        for _ in range(2):
            for q in out:
                v = v - inner(v, q) * q
        nv = np.linalg.norm(v)
        if nv > tol * max(scale, 1.0):
            out.append(v / nv)
    n = mats.shape[-1] if mats.ndim == 3 else 0
    return _as_stack(out, n)


def _coords(frame: np.ndarray, x: np.ndarray) -> np.ndarray:
    if len(frame) == 0:
        return np.zeros(0)
    return np.real(np.einsum("kij,ij->k", frame.conj(), x))


def _combine(frame: np.ndarray, c: np.ndarray) -> np.ndarray:
    if len(frame) == 0:
        n = frame.shape[-1]
        return np.zeros((n, n), dtype=complex)
    return np.tensordot(np.asarray(c, dtype=float), frame, axes=1)


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """Concrete matrix data for a compatible subgroup G of SL(n, C).

    ``field_mark`` is ``"real"`` when G preserves the real form R^n (so that
    P(R^n) is a G-stable submanifold) and ``"complex"`` otherwise.  ``weyl``
    selects how a is folded into a closed chamber: ``"permutation"`` for
    groups whose a is the traceless real diagonal and whose restricted Weyl
    group permutes the entries, ``"trivial"`` for abelian groups.
    """

    name: str
    n: int
    field_mark: str
    k_basis: np.ndarray
    p_basis: np.ndarray
    a_basis: np.ndarray
    weyl: str = "trivial"

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise GroupSpecError(f"matrix dimension must be a positive integer, got {n!r}")
        for label in ("k_basis", "p_basis", "a_basis"):
            raw = getattr(self, label)
            try:
                arr = _as_stack(list(raw), n)
            except ValueError as exc:
                raise GroupSpecError(f"{label}: ragged matrix list ({exc})") from None
            if arr.ndim != 3 or arr.shape[1:] != (n, n):
                raise GroupSpecError(f"{label}: expected matrices of shape ({n}, {n}), got {arr.shape[1:]}")
            arr.setflags(write=False)
            object.__setattr__(self, label, arr)
        if self.field_mark not in ("real", "complex"):
            raise GroupSpecError(f"field_mark must be 'real' or 'complex', got {self.field_mark!r}")
        if self.weyl not in ("permutation", "trivial"):
            raise GroupSpecError(f"unknown Weyl folding {self.weyl!r}")

    @cached_property
    def k_frame(self) -> np.ndarray:
        return orthonormalize(self.k_basis)

    @cached_property
    def p_frame(self) -> np.ndarray:
        return orthonormalize(self.p_basis)

    @cached_property
    def a_frame(self) -> np.ndarray:
        return orthonormalize(self.a_basis)

    @cached_property
    def g_frame(self) -> np.ndarray:
        return _as_stack(list(self.k_frame) + list(self.p_frame), self.n)

    @property
    def dim_k(self) -> int:
        return len(self.k_frame)

    @property
    def dim_p(self) -> int:
        return len(self.p_frame)

    @property
    def dim_a(self) -> int:
        return len(self.a_frame)

    @property
    def is_real(self) -> bool:
        return self.field_mark == "real"

    def p_coords(self, x: np.ndarray) -> np.ndarray:
        return _coords(self.p_frame, x)

    def a_coords(self, x: np.ndarray) -> np.ndarray:
        return _coords(self.a_frame, x)

    def k_coords(self, x: np.ndarray) -> np.ndarray:
        return _coords(self.k_frame, x)

    def p_matrix(self, c: np.ndarray) -> np.ndarray:
        return _combine(self.p_frame, c)

    def a_matrix(self, c: np.ndarray) -> np.ndarray:
        return _combine(self.a_frame, c)

    def k_matrix(self, c: np.ndarray) -> np.ndarray:
        return _combine(self.k_frame, c)

    def project_p(self, x: np.ndarray) -> np.ndarray:
        return self.p_matrix(self.p_coords(x))

    def project_a(self, x: np.ndarray) -> np.ndarray:
        return self.a_matrix(self.a_coords(x))

    def p_residual(self, x: np.ndarray) -> float:
        """Distance from x to span(p)."""
        return float(np.linalg.norm(x - self.project_p(x)))

    def abelian(self) -> "GroupSpec":
        """The subgroup A = exp(a) as a group in its own right."""
        return GroupSpec(
            name=f"{self.name}:abelian",
            n=self.n,
            field_mark=self.field_mark,
            k_basis=np.zeros((0, self.n, self.n)),
            p_basis=self.a_basis,
            a_basis=self.a_basis,
            weyl="trivial",
        )

    def compact(self) -> "GroupSpec":
        """The maximal compact subgroup K as a (degenerate) compatible group."""
        return GroupSpec(
            name=f"{self.name}:compact",
            n=self.n,
            field_mark=self.field_mark,
            k_basis=self.k_basis,
            p_basis=np.zeros((0, self.n, self.n)),
            a_basis=np.zeros((0, self.n, self.n)),
            weyl="trivial",
        )


# ----------------------------------------------------------------------------
# presets


def _unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def _traceless_diagonal(n: int) -> list[np.ndarray]:
    out = []
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        out.append(np.diag(d / np.sqrt(k * (k + 1))).astype(complex))
    return out


def sl_real(n: int) -> GroupSpec:
    """SL(n, R) with K = SO(n); p is the traceless real symmetric matrices."""
    k = [(_unit(n, i, j) - _unit(n, j, i)) / np.sqrt(2) for i, j in combinations(range(n), 2)]
    a = _traceless_diagonal(n)
    p = a + [(_unit(n, i, j) + _unit(n, j, i)) / np.sqrt(2) for i, j in combinations(range(n), 2)]
    return GroupSpec(f"sl{n}r", n, "real", np.array(k), np.array(p), np.array(a), weyl="permutation")


def sl_complex(n: int) -> GroupSpec:
    """SL(n, C) with K = SU(n); p is the traceless Hermitian matrices."""
    a = _traceless_diagonal(n)
    sym = [(_unit(n, i, j) + _unit(n, j, i)) / np.sqrt(2) for i, j in combinations(range(n), 2)]
    asym = [1j * (_unit(n, i, j) - _unit(n, j, i)) / np.sqrt(2) for i, j in combinations(range(n), 2)]
    p = a + sym + asym
    k = [1j * m for m in p]
    return GroupSpec(f"sl{n}c", n, "complex", np.array(k), np.array(p), np.array(a), weyl="permutation")


PRESETS = ("sl2r", "sl3r", "sl2c", "sl3c")
_PRESET_RE = re.compile(r"^sl(\d+)([rc])(?::(abelian|compact))?$")


def preset(name: str) -> GroupSpec:
    """Look up a preset by name: ``sl<n>r``, ``sl<n>c``, optionally with a
    ``:abelian`` or ``:compact`` suffix."""
    m = _PRESET_RE.match(name.strip().lower())
    if not m:
        raise KeyError(f"unknown preset {name!r}; try one of {', '.join(PRESETS)}")
    n = int(m.group(1))
    if n < 2:
        raise KeyError(f"preset {name!r} needs n >= 2")
    spec = sl_real(n) if m.group(2) == "r" else sl_complex(n)
    if m.group(3) == "abelian":
        spec = spec.abelian()
    elif m.group(3) == "compact":
        spec = spec.compact()
    return spec


# ----------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    value: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    spec_name: str
    checks: tuple[ValidationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _dist_to_span(x: np.ndarray, frame: np.ndarray) -> float:
    return float(np.linalg.norm(x - _combine(frame, _coords(frame, x))))


def validate_group_spec(spec: GroupSpec, rel_tol: float = 1e-10) -> ValidationReport:
    """Check the compatibility hypotheses numerically.

    Every residual must stay below ``rel_tol`` times the scale of the inputs
    (the largest basis norm, squared for bracket residuals).
    """
    mats = [m for m in (*spec.k_basis, *spec.p_basis, *spec.a_basis)]
    scale = max([1.0] + [float(np.linalg.norm(m)) for m in mats])
    tol1 = rel_tol * scale
    tol2 = rel_tol * scale**2
    k, p, a = spec.k_basis, spec.p_basis, spec.a_basis
    kf, pf = spec.k_frame, spec.p_frame

    def worst(values) -> float:
        values = list(values)
        return float(max(values)) if values else 0.0

    checks = []

    def add(name, value, tol):
        checks.append(ValidationCheck(name, float(value), float(tol), bool(value < tol)))

    add("k_anti_selfadjoint", worst(np.linalg.norm(x + x.conj().T) for x in k), tol1)
    add("p_selfadjoint", worst(np.linalg.norm(x - x.conj().T) for x in p), tol1)
    add("bracket_kk_in_k", worst(_dist_to_span(bracket(x, y), kf) for x, y in combinations(k, 2)), tol2)
    add("bracket_kp_in_p", worst(_dist_to_span(bracket(x, y), pf) for x in k for y in p), tol2)
    add("bracket_pp_in_k", worst(_dist_to_span(bracket(x, y), kf) for x, y in combinations(p, 2)), tol2)
    add("a_in_p", worst(_dist_to_span(x, pf) for x in a), tol1)
    add("a_commutative", worst(np.linalg.norm(bracket(x, y)) for x, y in combinations(a, 2)), tol2)

    if len(p):
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in p])
        min_eig = float(np.linalg.eigvalsh(flat @ flat.T).min())
        tol_pd = rel_tol * scale**2
        checks.append(ValidationCheck("p_inner_product_definite", min_eig, tol_pd, bool(min_eig > tol_pd)))

    # maximality: the centralizer of a inside p is a itself
    if len(pf):
        rows = []
        for x in a:
            rows.append(np.array([np.concatenate([bracket(x, q).real.ravel(), bracket(x, q).imag.ravel()]) for q in pf]).T)
        if rows:
            mat = np.vstack(rows)
            sv = np.linalg.svd(mat, compute_uv=False)
            cent_dim = int(np.sum(sv <= tol2)) + max(0, len(pf) - len(sv))
        else:
            cent_dim = len(pf)
        gap = abs(cent_dim - len(spec.a_frame))
        checks.append(ValidationCheck("a_maximal_abelian", float(gap), 0.5, gap == 0))
    return ValidationReport(spec.name, tuple(checks))


# ----------------------------------------------------------------------------
# ad(beta) eigenspaces and parabolic pieces


@dataclass(frozen=True, eq=False)
class AdEigenDecomposition:
    """Grading of g by the eigenvalues of ad(beta).

    ``eigenspaces[i]`` is an orthonormal stack of matrices spanning the
    eigenspace for ``eigenvalues[i]``.  ``zero_part`` spans g^beta,
    ``nonneg_part`` the parabolic g^{beta+} and ``pos_part`` its nilradical.
    """

    beta: np.ndarray
    eigenvalues: np.ndarray
    eigenspaces: tuple[np.ndarray, ...]
    zero_part: np.ndarray
    nonneg_part: np.ndarray
    pos_part: np.ndarray
    neg_part: np.ndarray
    k_beta: np.ndarray
    p_beta: np.ndarray


def _cluster(values: np.ndarray, thr: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(values[i] - values[groups[-1][-1]]) <= thr:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def _ad_matrix(beta: np.ndarray, frame: np.ndarray) -> np.ndarray:
    d = len(frame)
    m = np.zeros((d, d))
    for j, e in enumerate(frame):
        m[:, j] = _coords(frame, bracket(beta, e))
    return m


def _kernel_in(frame: np.ndarray, beta: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of {x in span(frame): [beta, x] = 0}."""
    n = beta.shape[0]
    if len(frame) == 0:
        return np.zeros((0, n, n), dtype=complex)
    cols = np.array([np.concatenate([bracket(beta, e).real.ravel(), bracket(beta, e).imag.ravel()]) for e in frame]).T
    _, s, vt = np.linalg.svd(cols, full_matrices=True)
    s_full = np.zeros(len(frame))
    s_full[: len(s)] = s
    null = vt[s_full <= tol]
    return _as_stack([np.tensordot(v, frame, axes=1) for v in null], n)


def ad_decompose(spec: GroupSpec, beta: np.ndarray, cluster_rel: float = 1e-8) -> AdEigenDecomposition:
    beta = np.asarray(beta, dtype=complex)
    bnorm = float(np.linalg.norm(beta))
    if spec.p_residual(beta) > 1e-9 * max(1.0, bnorm):
        raise ValueError(f"beta is not in p (distance {spec.p_residual(beta):.3e})")
    frame = spec.g_frame
    n = spec.n
    thr = cluster_rel * bnorm
    if len(frame):
        m = _ad_matrix(beta, frame)
        m = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(m)
    else:
        w, v = np.zeros(0), np.zeros((0, 0))
    groups = _cluster(w, thr) if len(w) else []
    eigenvalues, spaces = [], []
    zero, nonneg, pos, neg = [], [], [], []
    for idx in groups:
        lam = float(np.mean(w[idx]))
        mats = [np.tensordot(v[:, i], frame, axes=1) for i in idx]
        if abs(lam) <= thr:
            lam = 0.0
        eigenvalues.append(lam)
        spaces.append(_as_stack(mats, n))
        if lam == 0.0:
            zero += mats
            nonneg += mats
        elif lam > 0:
            pos += mats
            nonneg += mats
        else:
            neg += mats
    ktol = max(thr, 1e-12)
    return AdEigenDecomposition(
        beta=beta,
        eigenvalues=np.array(eigenvalues),
        eigenspaces=tuple(spaces),
        zero_part=_as_stack(zero, n),
        nonneg_part=_as_stack(nonneg, n),
        pos_part=_as_stack(pos, n),
        neg_part=_as_stack(neg, n),
        k_beta=_kernel_in(spec.k_frame, beta, ktol),
        p_beta=_kernel_in(spec.p_frame, beta, ktol),
    )


@dataclass(frozen=True, eq=False)
class ConjugationLimit:
    limit: np.ndarray | None
    converged: bool
    diverged_at: float | None = None
    last_time: float | None = None


def conj_limit(
    spec: GroupSpec,
    beta: np.ndarray,
    g: np.ndarray,
    t_schedule: Sequence[float] | None = None,
    tol: float = 1e-10,
) -> ConjugationLimit:
    """Limit of exp(t beta) g exp(-t beta) as t -> -infinity.

    Conjugation is evaluated in the eigenbasis of the Hermitian matrix beta,
    where it multiplies entry (i, j) by exp(t (lam_i - lam_j)).
    """
    beta = np.asarray(beta, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if abs(np.linalg.det(g)) < 1e-14 * max(1.0, np.linalg.norm(g)) ** spec.n:
        raise ValueError("group element is singular")
    if t_schedule is None:
        t_schedule = -(2.0 ** np.arange(0, 12))
    times = np.asarray(t_schedule, dtype=float)
    if np.any(np.diff(times) >= 0):
        raise ValueError("t_schedule must be strictly decreasing")
    lam, q = np.linalg.eigh(beta)
    c = q.conj().T @ g @ q
    diff = lam[:, None] - lam[None, :]
    prev = None
    scale = max(1.0, float(np.linalg.norm(g)))
    with np.errstate(over="ignore", invalid="ignore"):
        for t in times:
            cur = q @ (c * np.exp(t * diff)) @ q.conj().T
            if not np.all(np.isfinite(cur)) or np.abs(cur).max() > 1e150:
                return ConjugationLimit(None, False, diverged_at=float(t), last_time=float(t))
            if prev is not None and np.linalg.norm(cur - prev) < tol * scale:
                return ConjugationLimit(cur, True, last_time=float(t))
            prev = cur
    return ConjugationLimit(None, False, diverged_at=None, last_time=float(times[-1]))


# ----------------------------------------------------------------------------
# restricted Weyl folding


@dataclass(frozen=True, eq=False)
class WeylOrbitRep:
    point: np.ndarray
    chamber_rep: np.ndarray

    def same_orbit(self, other: "WeylOrbitRep", tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.chamber_rep - other.chamber_rep) <= tol)


def _fold(spec: GroupSpec, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if spec.weyl == "trivial" or spec.dim_a == 0:
        return v.copy()
    mat = spec.a_matrix(v)
    diag = np.real(np.diag(mat))
    if np.linalg.norm(mat - np.diag(np.diag(mat))) > 1e-9 * max(1.0, np.linalg.norm(mat)):
        raise GroupSpecError("permutation Weyl folding needs a diagonal a_basis")
    return spec.a_coords(np.diag(np.sort(diag)[::-1]).astype(complex))


def weyl_fold(spec: GroupSpec, v: np.ndarray):
    """Fold v into a_+ and return ``(rep, w)`` where ``w`` applies the same
    Weyl group element to other points of a."""
    v = np.asarray(v, dtype=float)
    if spec.weyl == "trivial" or spec.dim_a == 0:
        return v.copy(), lambda u: np.asarray(u, dtype=float).copy()
    diag = np.real(np.diag(spec.a_matrix(v)))
    perm = np.argsort(-diag, kind="stable")

    def w(u):
        d = np.real(np.diag(spec.a_matrix(np.asarray(u, dtype=float))))
        return spec.a_coords(np.diag(d[perm]).astype(complex))

    return _fold(spec, v), w


def chamber_representative(spec: GroupSpec, v: np.ndarray) -> WeylOrbitRep:
    """Fold a point of a (coordinates in the orthonormal a-frame) into a_+.

    For the permutation presets the chamber is "diagonal entries in
    descending order".
    """
    v = np.asarray(v, dtype=float)
    return WeylOrbitRep(point=v, chamber_rep=_fold(spec, v))


def spectral_chamber_coords(spec: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Chamber coordinates of the K-orbit through an element x of p.

    For permutation presets K conjugates x into a, so the sorted spectrum of
    x is the chamber point.  For abelian groups p = a and x is projected.
    """
    if spec.dim_a == 0:
        return np.zeros(0)
    if spec.weyl == "permutation":
        ev = np.linalg.eigvalsh(0.5 * (x + x.conj().T))[::-1]
        return spec.a_coords(np.diag(ev).astype(complex))
    return spec.a_coords(x)


# ----------------------------------------------------------------------------
# serialization


def _mat_to_json(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _mat_from_json(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def spec_to_dict(spec: GroupSpec) -> dict:
    return {
        "name": spec.name,
        "n": int(spec.n),
        "field_mark": spec.field_mark,
        "weyl": spec.weyl,
        "k_basis": [_mat_to_json(m) for m in spec.k_basis],
        "p_basis": [_mat_to_json(m) for m in spec.p_basis],
        "a_basis": [_mat_to_json(m) for m in spec.a_basis],
    }


def spec_from_dict(d: dict) -> GroupSpec:
    try:
        n = int(d["n"])
        return GroupSpec(
            name=str(d["name"]),
            n=n,
            field_mark=d.get("field_mark", "complex"),
            k_basis=_as_stack([_mat_from_json(m) for m in d.get("k_basis", [])], n),
            p_basis=_as_stack([_mat_from_json(m) for m in d.get("p_basis", [])], n),
            a_basis=_as_stack([_mat_from_json(m) for m in d.get("a_basis", [])], n),
            weyl=d.get("weyl", "trivial"),
        )
    except (KeyError, TypeError) as exc:
        raise GroupSpecError(f"malformed group document: {exc}") from None


def dump_spec(spec: GroupSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=1, sort_keys=True) + "\n")


def load_spec(path: str | Path) -> GroupSpec:
    return spec_from_dict(json.loads(Path(path).read_text()))
