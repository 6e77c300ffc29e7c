"""Candidate critical values: weights of the torus fixed points and the
closest-to-origin points of their convex hulls."""
from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .lie_core import GroupSpec, GroupSpecError, weyl_fold
from .proj_geom import ProjPoint

__all__ = [
    "WeightTable",
    "CandidateBeta",
    "CandidateBudgetError",
    "extract_weights",
    "min_norm_point",
    "enumerate_candidates",
    "confirm_candidates",
    "hull_residual",
    "dedup_tolerance",
]


class CandidateBudgetError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Distinct values of mu_a on the fixed points of A = exp(a).

    ``weights[i]`` holds coordinates in the orthonormal a-frame,
    ``fixed_points[i]`` one fixed point with that weight and
    ``multiplicities[i]`` the dimension of the joint eigenspace.
    """

    weights: np.ndarray
    fixed_points: tuple[ProjPoint, ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.weights)


def extract_weights(spec: GroupSpec, real: bool = False, tol: float = 1e-9) -> WeightTable:
    n = spec.n
    a = spec.a_frame
    if len(a) == 0:
        vecs = np.eye(n, dtype=complex)
    else:
        # a generic combination separates all joint eigenspaces
        rng = np.random.default_rng(20240917)
        coeffs = rng.uniform(1.0, 2.0, len(a))
        h = np.tensordot(coeffs, a, axes=1)
        h = 0.5 * (h + h.conj().T)
        if real:
            if np.abs(h.imag).max() > tol:
                raise GroupSpecError("a is not real; no real joint eigenbasis")
            _, vecs = np.linalg.eigh(h.real)
            vecs = vecs.astype(complex)
        else:
            _, vecs = np.linalg.eigh(h)
        for m in a:
            d = vecs.conj().T @ m @ vecs
            off = np.linalg.norm(d - np.diag(np.diag(d)))
            if off > tol * max(1.0, np.linalg.norm(m)):
                raise GroupSpecError(f"a-basis is not simultaneously diagonalizable (residual {off:.3e})")
    weights, points, mults = [], [], []
    for j in range(n):
        v = vecs[:, j]
        w = np.array([np.real(np.vdot(v, m @ v)) for m in a])
        for i, existing in enumerate(weights):
            if np.linalg.norm(existing - w) <= tol:
                mults[i] += 1
                break
        else:
            weights.append(w)
            points.append(ProjPoint(v))
            mults.append(1)
    return WeightTable(np.array(weights).reshape(len(weights), len(a)), tuple(points), tuple(mults))


def _affine_minimizer(p: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of the point of aff(p) closest to the origin."""
    k = len(p)
    if k == 1:
        return np.ones(1)
    g = p @ p.T
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = g
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    lam = sol[:k]
    return lam / lam.sum()


def min_norm_point(points: Sequence[Sequence[float]] | np.ndarray, tol: float = 1e-12, max_iter: int = 1000):
    """Wolfe's algorithm for the minimum-norm point of conv(points).

    Returns ``(x, coefficients)`` where ``coefficients`` has one entry per
    input point, is supported on an affinely independent subset and sums to one.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    m = len(pts)
    if m == 0:
        raise ValueError("need at least one point")
    scale = max(1.0, float(np.max(np.sum(pts**2, axis=1))))
    eps = tol * scale
    j0 = int(np.argmin(np.sum(pts**2, axis=1)))
    support = [j0]
    lam = np.ones(1)
    x = pts[j0].copy()
    for _ in range(max_iter):
        j = int(np.argmin(pts @ x))
        if x @ x - pts[j] @ x <= eps or j in support:
            break
        support.append(j)
        lam = np.append(lam, 0.0)
        while True:
            y = _affine_minimizer(pts[support])
            if np.all(y > 1e-14):
                lam = y
                break
            neg = y <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - y), np.inf)
            theta = float(np.min(ratios[neg])) if np.any(neg) else 1.0
            theta = min(max(theta, 0.0), 1.0)
            lam = theta * y + (1.0 - theta) * lam
            keep = lam > 1e-14
            keep[np.argmax(lam)] = True
            support = [s for s, k in zip(support, keep) if k]
            lam = lam[keep]
            lam /= lam.sum()
        x = lam @ pts[support]
    coeffs = np.zeros(m)
    coeffs[support] = lam
    return coeffs @ pts, coeffs


def hull_residual(vertices: np.ndarray, point: np.ndarray) -> float:
    """L1 infeasibility of writing ``point`` as a convex combination of the
    vertices (zero iff the point is in the hull), via a linear program."""
    v = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    m, d = v.shape
    # variables: lambda (m), s_plus (d), s_minus (d)
    c = np.concatenate([np.zeros(m), np.ones(2 * d)])
    a_eq = np.zeros((d + 1, m + 2 * d))
    a_eq[:d, :m] = v.T
    a_eq[:d, m : m + d] = -np.eye(d)
    a_eq[:d, m + d :] = np.eye(d)
    a_eq[d, :m] = 1.0
    b_eq = np.concatenate([p, [1.0]])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return float("inf")
    return float(res.fun)


@dataclass(frozen=True, eq=False)
class CandidateBeta:
    beta: np.ndarray
    norm: float
    support: tuple[int, ...]
    witness_coeffs: np.ndarray
    confirmed: bool = False

    def matrix(self, spec: GroupSpec) -> np.ndarray:
        return spec.a_matrix(self.beta)


def dedup_tolerance(table: WeightTable) -> float:
    wmax = float(np.max(np.linalg.norm(table.weights, axis=1))) if len(table) else 0.0
    return 1e-7 * (1.0 + wmax)


def enumerate_candidates(
    spec: GroupSpec,
    table: WeightTable,
    max_support: int | None = None,
    budget: int = 200_000,
) -> list[CandidateBeta]:
    """All chamber-folded minimum-norm points of hulls of weight subsets.

    The result is a superset of the realized critical values in a_+ and is
    sorted by norm, then lexicographically.
    """
    if len(table) == 0:
        raise ValueError("empty weight table")
    m = len(table)
    if max_support is None:
        max_support = spec.dim_a + 1
    max_support = max(1, min(max_support, m))
    total = sum(comb(m, r) for r in range(1, max_support + 1))
    if total > budget:
        raise CandidateBudgetError(f"{total} weight subsets exceed the budget of {budget}")
    tol = dedup_tolerance(table)
    found: list[CandidateBeta] = []
    for r in range(1, max_support + 1):
        for subset in combinations(range(m), r):
            pts = table.weights[list(subset)]
            x, coeffs = min_norm_point(pts)
            rep, w = weyl_fold(spec, x)
            if any(np.linalg.norm(c.beta - rep) <= tol for c in found):
                continue
            used = [subset[i] for i in np.flatnonzero(coeffs > 0)]
            support = _weyl_image(table, [w(table.weights[i]) for i in used], tol)
            if support is None:
                # weight table not Weyl stable; keep the unfolded witness
                support = used
            found.append(
                CandidateBeta(
                    beta=rep,
                    norm=float(np.linalg.norm(rep)),
                    support=tuple(int(i) for i in support),
                    witness_coeffs=coeffs[coeffs > 0],
                )
            )
    found.sort(key=lambda c: (round(c.norm, 9), tuple(np.round(c.beta, 9))))
    return found


def _weyl_image(table: WeightTable, images: list[np.ndarray], tol: float) -> list[int] | None:
    out = []
    for u in images:
        d = np.linalg.norm(table.weights - u, axis=1)
        j = int(np.argmin(d))
        if d[j] > tol:
            return None
        out.append(j)
    return out


def confirm_candidates(candidates: Sequence[CandidateBeta], realized: Iterable[int]) -> list[CandidateBeta]:
    """Mark the candidates whose indices were observed as flow limits."""
    hits = set(realized)
    return [replace(c, confirmed=i in hits) for i, c in enumerate(candidates)]
