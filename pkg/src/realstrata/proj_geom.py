"""Geometry of P(C^n) with the Fubini-Study structure and the G-gradient map.

Conventions
-----------
Points are unit vectors ``z`` up to phase.  A tangent vector at ``[z]`` is a
vector ``v`` in C^n with ``z^* v = 0`` (the horizontal lift).  The Riemannian
metric is ``(v, w) = 2 Re(w^* v)`` and the symplectic form is
``omega(v, w) = 2 Im(w^* v)``; with these the moment map

    mu^xi([z]) = <xi z, z> / (i <z, z>)

satisfies ``d mu^xi = omega(xi_Z, .)``.  The gradient map is defined by
``<mu_p(z), beta> = MOMENT_SIGN * mu^{-i beta}(z) = z^* beta z / |z|^2`` so that
``grad mu_p^beta = beta_X`` holds with a plus sign for the metric above.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lie_core import GroupSpec, _cluster

__all__ = [
    "MOMENT_SIGN",
    "ProjPoint",
    "GradientMapEval",
    "TangentDecomposition",
    "Hessian",
    "NotCriticalError",
    "NotFixedError",
    "metric",
    "symplectic",
    "horizontal",
    "random_point",
    "act",
    "eval_moment",
    "gradient_map_coords",
    "gradient_map_matrix",
    "eval_gradient_map",
    "eta",
    "vector_field",
    "infinitesimal_action",
    "dmu_p",
    "tangent_basis",
    "geodesic",
    "tangent_decompose",
    "hessian_eta",
    "is_critical",
    "critical_tolerance",
]

# <mu_p, beta> = MOMENT_SIGN * mu^{-i beta}; fixed by grad mu_p^beta = +beta_X.
MOMENT_SIGN = -1.0


class NotCriticalError(ValueError):
    pass


class NotFixedError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"point is not fixed by beta (|beta_X(x)| = {residual:.3e})")
        self.residual = residual


def _canonical(v: np.ndarray) -> np.ndarray:
    z = np.asarray(v, dtype=complex).copy()
    nrm = np.linalg.norm(z)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValueError("cannot build a projective point from a zero or non-finite vector")
    z /= nrm
    j = int(np.argmax(np.abs(z)))
    z *= np.abs(z[j]) / z[j]
    return z


class ProjPoint:
    """A point [z] of P(C^n), stored as a unit representative with the
    largest-modulus coordinate made real and positive."""

    __slots__ = ("rep", "real_flag")
    __hash__ = None  # equality is tolerance based

    def __init__(self, v: Sequence[complex] | np.ndarray, real_tol: float = 1e-12):
        z = _canonical(v)
        z.setflags(write=False)
        self.rep = z
        self.real_flag = bool(np.abs(z.imag).max() <= real_tol)

    @property
    def n(self) -> int:
        return self.rep.shape[0]

    def overlap(self, other: "ProjPoint") -> float:
        return float(abs(np.vdot(self.rep, other.rep)))

    def distance(self, other: "ProjPoint") -> float:
        """Fubini-Study angle between the two lines."""
        ip = np.vdot(other.rep, self.rep)
        phase = ip / abs(ip) if abs(ip) > 0 else 1.0
        chord = float(np.linalg.norm(self.rep - phase * other.rep))
        return 2.0 * float(np.arcsin(min(1.0, chord / 2.0)))

    def same_as(self, other: "ProjPoint", tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.same_as(other)

    def real_vector(self) -> np.ndarray:
        if not self.real_flag:
            raise ValueError("point is not on the real locus")
        return self.rep.real.copy()

    def to_reals(self) -> list[float]:
        """Interleaved (re, im) pairs."""
        return [float(x) for c in self.rep for x in (c.real, c.imag)]

    @classmethod
    def from_reals(cls, values: Sequence[float]) -> "ProjPoint":
        vals = np.asarray(values, dtype=float)
        if vals.size % 2:
            raise ValueError("need an even number of reals")
        return cls(vals[0::2] + 1j * vals[1::2])

    def __repr__(self) -> str:
        body = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.rep)
        return f"ProjPoint([{body}])"


def metric(v: np.ndarray, w: np.ndarray) -> float:
    return 2.0 * float(np.real(np.vdot(w, v)))


def symplectic(v: np.ndarray, w: np.ndarray) -> float:
    return 2.0 * float(np.imag(np.vdot(w, v)))


def horizontal(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w - np.vdot(z, w) * z


def _rep(x) -> np.ndarray:
    return x.rep if isinstance(x, ProjPoint) else np.asarray(x, dtype=complex)


def random_point(n: int, rng: np.random.Generator, real: bool = False) -> ProjPoint:
    """Unitarily invariant random point of P(C^n), or O(n)-invariant of P(R^n)."""
    if real:
        return ProjPoint(rng.standard_normal(n))
    return ProjPoint(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def act(g: np.ndarray, x: ProjPoint) -> ProjPoint:
    g = np.asarray(g, dtype=complex)
    if g.shape != (x.n, x.n):
        raise ValueError(f"group element of shape {g.shape} cannot act on P^{x.n - 1}")
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= 1e-13 * sv[0]:
        raise ValueError("singular matrix does not act on projective space")
    return ProjPoint(g @ x.rep)


def eval_moment(spec: GroupSpec | None, xi: np.ndarray, x: ProjPoint, tol: float = 1e-10) -> float:
    """mu^xi([z]) = <xi z, z> / (i <z, z>) for anti-Hermitian xi."""
    xi = np.asarray(xi, dtype=complex)
    if np.linalg.norm(xi + xi.conj().T) > tol * max(1.0, np.linalg.norm(xi)):
        raise ValueError("xi must be anti-selfadjoint")
    z = x.rep
    val = np.vdot(z, xi @ z) / (1j * np.vdot(z, z))
    if abs(val.imag) > 1e-12 * max(1.0, np.linalg.norm(xi)):
        raise ArithmeticError(f"moment map value has imaginary part {val.imag:.3e}")
    return float(val.real)


def gradient_map_coords(spec: GroupSpec, z) -> np.ndarray:
    """Coordinates of mu_p([z]) in the orthonormal frame of p."""
    z = _rep(z)
    if spec.dim_p == 0:
        return np.zeros(0)
    frame = spec.p_frame
    return np.real(np.einsum("i,kij,j->k", z.conj(), frame, z)) / np.real(np.vdot(z, z))


def gradient_map_matrix(spec: GroupSpec, z) -> np.ndarray:
    return spec.p_matrix(gradient_map_coords(spec, z))


def eta(spec: GroupSpec, z) -> float:
    c = gradient_map_coords(spec, z)
    return 0.5 * float(c @ c)


def vector_field(spec: GroupSpec | None, beta: np.ndarray, x) -> np.ndarray:
    """beta_X(x): the horizontal velocity of t -> exp(t beta) x at t = 0."""
    z = _rep(x)
    return horizontal(z, np.asarray(beta) @ z)


infinitesimal_action = vector_field


def critical_tolerance(mu_norm: float) -> float:
    return 1e-8 * (1.0 + mu_norm)


@dataclass(frozen=True, eq=False)
class GradientMapEval:
    point: ProjPoint
    mu_p: np.ndarray
    coords: np.ndarray
    eta: float
    grad_eta_norm: float

    @property
    def mu_norm(self) -> float:
        return float(np.sqrt(2.0 * self.eta))

    @property
    def critical(self) -> bool:
        return self.grad_eta_norm < critical_tolerance(self.mu_norm)


def eval_gradient_map(spec: GroupSpec, x: ProjPoint) -> GradientMapEval:
    c = gradient_map_coords(spec, x)
    mu = spec.p_matrix(c)
    v = vector_field(spec, mu, x)
    return GradientMapEval(
        point=x,
        mu_p=mu,
        coords=c,
        eta=0.5 * float(c @ c),
        grad_eta_norm=float(np.sqrt(max(metric(v, v), 0.0))),
    )


def is_critical(spec: GroupSpec, x: ProjPoint) -> bool:
    return eval_gradient_map(spec, x).critical


def dmu_p(spec: GroupSpec, x, v: np.ndarray) -> np.ndarray:
    """Coordinates of d mu_p(x) v in the p-frame (v horizontal)."""
    z = _rep(x)
    if spec.dim_p == 0:
        return np.zeros(0)
    return 2.0 * np.real(np.einsum("i,kij,j->k", z.conj(), spec.p_frame, v))


def tangent_basis(x: ProjPoint, real: bool = False) -> np.ndarray:
    """Rows form an orthonormal basis of T_x X for the metric (v, w) = 2 Re(w^* v).

    ``real=True`` uses X = P(R^n) (the point must lie on the real locus).
    """
    z = x.rep
    n = z.shape[0]
    if real:
        zr = x.real_vector()
        q, _ = np.linalg.qr(np.column_stack([zr, np.eye(n)]))
        comp = q[:, 1:n].T
        return comp.astype(complex) / np.sqrt(2.0)
    q, _ = np.linalg.qr(np.column_stack([z, np.eye(n, dtype=complex)]))
    comp = q[:, 1:n].T
    return np.vstack([comp, 1j * comp]) / np.sqrt(2.0)


def geodesic(x: ProjPoint, v: np.ndarray, t: float) -> ProjPoint:
    """Fubini-Study geodesic through x with horizontal initial velocity v."""
    z = x.rep
    s = np.linalg.norm(v)
    if s == 0:
        return x
    return ProjPoint(np.cos(s * t) * z + np.sin(s * t) * (v / s))


@dataclass(frozen=True, eq=False)
class TangentDecomposition:
    base: ProjPoint
    beta: np.ndarray
    basis: np.ndarray
    operator: np.ndarray
    eigenpairs: tuple[tuple[float, np.ndarray], ...]
    zero_span: np.ndarray
    pos_span: np.ndarray
    neg_span: np.ndarray

    @property
    def nonneg_span(self) -> np.ndarray:
        return np.vstack([self.zero_span, self.pos_span])

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([np.full(len(vs), lam) for lam, vs in self.eigenpairs]) if self.eigenpairs else np.zeros(0)


def _fixed_operator(beta: np.ndarray, x: ProjPoint, basis: np.ndarray) -> np.ndarray:
    """Matrix of d beta_X(x) in an orthonormal tangent basis; v -> (beta - lam0) v."""
    z = x.rep
    lam0 = np.real(np.vdot(z, beta @ z))
    images = [(beta @ e) - lam0 * e for e in basis]
    return np.array([[metric(images[j], basis[i]) for j in range(len(basis))] for i in range(len(basis))])


def tangent_decompose(
    spec: GroupSpec | None,
    beta: np.ndarray,
    x: ProjPoint,
    real: bool = False,
    tol: float | None = None,
    zero_tol: float = 0.0,
) -> TangentDecomposition:
    """Eigen-splitting of T_x X under d beta_X(x) at a beta-fixed point.

    Eigenvalues within ``max(1e-8 |beta|, zero_tol)`` of zero count as zero;
    ``zero_tol`` absorbs the error of a numerically located beta.
    """
    beta = np.asarray(beta, dtype=complex)
    bnorm = float(np.linalg.norm(beta))
    v = vector_field(spec, beta, x)
    res = float(np.sqrt(metric(v, v)))
    if res >= (tol if tol is not None else critical_tolerance(bnorm)):
        raise NotFixedError(res)
    basis = tangent_basis(x, real=real)
    op = _fixed_operator(beta, x, basis)
    asym = float(np.abs(op - op.T).max()) if op.size else 0.0
    if asym > 1e-10 * max(1.0, bnorm):
        raise ArithmeticError(f"linearized field not selfadjoint (asymmetry {asym:.3e})")
    op = 0.5 * (op + op.T)
    w, vecs = np.linalg.eigh(op) if op.size else (np.zeros(0), np.zeros((0, 0)))
    thr = max(1e-8 * bnorm, zero_tol, 1e-300)
    pairs = []
    zero, pos, neg = [], [], []
    for idx in _cluster(w, thr):
        lam = float(np.mean(w[idx]))
        if abs(lam) <= thr:
            lam = 0.0
        tv = np.array([vecs[:, i] @ basis for i in idx])
        pairs.append((lam, tv))
        (zero if lam == 0.0 else pos if lam > 0 else neg).extend(tv)
    n = x.n
    empty = np.zeros((0, n), dtype=complex)
    return TangentDecomposition(
        base=x,
        beta=beta,
        basis=basis,
        operator=op,
        eigenpairs=tuple(pairs),
        zero_span=np.array(zero) if zero else empty,
        pos_span=np.array(pos) if pos else empty,
        neg_span=np.array(neg) if neg else empty,
    )


@dataclass(frozen=True, eq=False)
class Hessian:
    """Hessian of eta_p at a critical point, in an orthonormal tangent basis."""

    point: ProjPoint
    beta: np.ndarray
    basis: np.ndarray
    matrix: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix) if self.matrix.size else np.zeros(0)

    def form(self, v: np.ndarray, w: np.ndarray | None = None) -> float:
        w = v if w is None else w
        cv = np.array([metric(v, e) for e in self.basis])
        cw = np.array([metric(w, e) for e in self.basis])
        return float(cv @ self.matrix @ cw)


def hessian_eta(spec: GroupSpec, x: ProjPoint, real: bool = False) -> Hessian:
    """H(v, w) = (d beta_X(x) v, w) + <d mu_p(x) v, d mu_p(x) w>, beta = mu_p(x).

    On an eigenvector v of d beta_X(x) with eigenvalue lam this is
    lam |v|^2 + |d mu_p(x) v|^2.
    """
    ev = eval_gradient_map(spec, x)
    if not ev.critical:
        raise NotCriticalError(f"point is not critical for eta_p (|grad| = {ev.grad_eta_norm:.3e})")
    basis = tangent_basis(x, real=real)
    op = _fixed_operator(ev.mu_p, x, basis)
    d = np.array([dmu_p(spec, x, e) for e in basis])
    h = op + (d @ d.T if d.size else 0.0)
    return Hessian(point=x, beta=ev.mu_p, basis=basis, matrix=0.5 * (h + h.T))
