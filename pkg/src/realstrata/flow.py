"""Negative gradient flow of eta_p and stratum labelling by flow limits."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._integrate import FlowError, FlowOptions, GradientSystem, integrate
from .candidates import CandidateBeta
from .lie_core import GroupSpec, spectral_chamber_coords
from .proj_geom import (
    GradientMapEval,
    NotCriticalError,
    ProjPoint,
    eval_gradient_map,
    geodesic,
    hessian_eta,
    metric,
    random_point,
    tangent_basis,
    tangent_decompose,
    vector_field,
)

__all__ = [
    "FlowError",
    "FlowOptions",
    "FlowTrace",
    "StratumLabel",
    "SeedRecord",
    "SurveyReport",
    "AuditReport",
    "HessianReport",
    "flow_to_limit",
    "match_label",
    "classify_point",
    "basin_survey",
    "closure_audit",
    "check_hessian_at_limits",
    "seed_rng",
]


@dataclass(frozen=True, eq=False)
class FlowTrace:
    seed: ProjPoint
    times: np.ndarray
    points: np.ndarray
    etas: np.ndarray
    grad_norms: np.ndarray
    terminal: ProjPoint
    terminal_eval: GradientMapEval
    converged: bool
    stalled: bool
    step_count: int
    rejected_steps: int
    wall_time: float
    stratum_label: "StratumLabel | None" = None

    @property
    def samples(self) -> list[tuple[float, ProjPoint, float]]:
        return [(float(t), ProjPoint(p), float(e)) for t, p, e in zip(self.times, self.points, self.etas)]

    def __len__(self) -> int:
        return len(self.times)


def flow_to_limit(
    spec: GroupSpec,
    seed: ProjPoint,
    opts: FlowOptions | None = None,
    real: bool = False,
) -> FlowTrace:
    """Integrate dz/dt = -(mu_p(z))_X(z) until a critical point is reached.

    ``real=True`` runs on X = P(R^n); the seed must lie there and the group
    must preserve it.
    """
    opts = opts or FlowOptions()
    if real and not spec.is_real:
        raise FlowError(f"{spec.name} does not preserve the real locus")
    raw = integrate(GradientSystem(spec.p_frame), seed.rep, opts, real=real)
    terminal = ProjPoint(raw.points[-1])
    return FlowTrace(
        seed=seed,
        times=raw.times,
        points=raw.points,
        etas=raw.etas,
        grad_norms=raw.grad_norms,
        terminal=terminal,
        terminal_eval=eval_gradient_map(spec, terminal),
        converged=raw.converged,
        stalled=raw.stalled,
        step_count=raw.steps,
        rejected_steps=raw.rejected,
        wall_time=raw.wall_time,
    )


@dataclass(frozen=True, eq=False)
class StratumLabel:
    """Outcome of classifying one point.

    ``index`` points into the candidate list (``None`` when unmatched or when
    the flow did not converge); ``beta`` is the chamber point computed from
    the flow terminal.
    """

    index: int | None
    beta: np.ndarray
    distance: float
    matched: bool
    converged: bool

    @property
    def key(self) -> str:
        if not self.converged:
            return "unconverged"
        return str(self.index) if self.matched else "unmatched"


def match_tolerance(beta_norm: float) -> float:
    return 1e-5 * (1.0 + beta_norm)


def match_label(spec: GroupSpec, mu: np.ndarray, candidates: Sequence[CandidateBeta]) -> tuple[int | None, np.ndarray, float]:
    """Nearest candidate to the chamber point of mu (an element of p)."""
    beta = spectral_chamber_coords(spec, mu)
    if not candidates:
        return None, beta, float("inf")
    dists = [float(np.linalg.norm(c.beta - beta)) for c in candidates]
    j = int(np.argmin(dists))
    if dists[j] <= match_tolerance(float(np.linalg.norm(beta))):
        return j, beta, dists[j]
    return None, beta, dists[j]


def classify_point(
    spec: GroupSpec,
    seed: ProjPoint,
    candidates: Sequence[CandidateBeta],
    opts: FlowOptions | None = None,
    real: bool = False,
) -> tuple[StratumLabel, FlowTrace]:
    trace = flow_to_limit(spec, seed, opts, real=real)
    idx, beta, dist = match_label(spec, trace.terminal_eval.mu_p, candidates)
    label = StratumLabel(
        index=idx if trace.converged else None,
        beta=beta,
        distance=dist,
        matched=idx is not None,
        converged=trace.converged,
    )
    return label, replace(trace, stratum_label=label)


def seed_rng(rng_seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for one seed, stable under any scheduling."""
    return np.random.default_rng(np.random.SeedSequence([int(rng_seed), int(stream), int(index)]))


@dataclass(frozen=True, eq=False)
class SeedRecord:
    kind: str
    index: int
    point: ProjPoint
    label: StratumLabel
    eta: float
    steps: int
    terminal: ProjPoint
    stalled: bool = False  # eta plateaued away from a critical point


@dataclass(frozen=True, eq=False)
class AuditReport:
    eps_values: tuple[float, ...]
    points_checked: int
    adjacencies: tuple[tuple[int, str, str], ...]
    violations: tuple[tuple[int, str, str], ...]
    per_eps_counts: dict
    unresolved: int

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=False)
class SurveyReport:
    spec_name: str
    rng_seed: int
    records: tuple[SeedRecord, ...]
    candidates: tuple[CandidateBeta, ...]
    audit: AuditReport | None = None

    def counts(self, kind: str | None = None) -> Counter:
        return Counter(r.label.key for r in self.records if kind is None or r.kind == kind)

    @property
    def unmatched(self) -> int:
        return sum(1 for r in self.records if r.label.key in ("unmatched", "unconverged"))

    @property
    def realized(self) -> set[int]:
        return {r.label.index for r in self.records if r.label.index is not None}

    def percentages(self, kind: str | None = None) -> dict[str, float]:
        c = self.counts(kind)
        total = sum(c.values())
        return {k: 100.0 * v / total for k, v in sorted(c.items())} if total else {}


def _classify_seed(args):
    spec, kind, index, rng_seed, candidates, opts = args
    stream = 0 if kind == "complex" else 1
    rng = seed_rng(rng_seed, stream, index)
    point = random_point(spec.n, rng, real=(kind == "real"))
    label, trace = classify_point(spec, point, candidates, opts)
    return SeedRecord(kind, index, point, label, trace.terminal_eval.eta, trace.step_count, trace.terminal, trace.stalled)


def basin_survey(
    spec: GroupSpec,
    n_seeds: int,
    rng_seed: int,
    candidates: Sequence[CandidateBeta],
    real_seeds: int = 0,
    opts: FlowOptions | None = None,
    audit_points: int = 0,
    audit_neighbors: int = 6,
    audit_eps: Sequence[float] = (1e-2, 1e-3),
    workers: int = 1,
) -> SurveyReport:
    """Classify ``n_seeds`` uniform points of P(C^n) and ``real_seeds`` points
    of P(R^n); optionally run the closure-ordering audit on the first
    ``audit_points`` records of each kind."""
    opts = opts or FlowOptions(record=False)
    candidates = tuple(candidates)
    jobs = [(spec, "complex", i, rng_seed, candidates, opts) for i in range(n_seeds)]
    if real_seeds:
        if not spec.is_real:
            raise FlowError(f"{spec.name} has no invariant real locus")
        jobs += [(spec, "real", i, rng_seed, candidates, opts) for i in range(real_seeds)]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_classify_seed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        records = [_classify_seed(j) for j in jobs]
    audit = None
    if audit_points:
        chosen = [r for r in records if r.kind == "complex"][:audit_points] + [r for r in records if r.kind == "real"][:audit_points]
        audit = closure_audit(spec, chosen, candidates, audit_eps, audit_neighbors, rng_seed, opts)
    return SurveyReport(spec.name, int(rng_seed), tuple(records), candidates, audit)


def _random_unit_tangent(x: ProjPoint, rng: np.random.Generator) -> np.ndarray:
    basis = tangent_basis(x)
    c = rng.standard_normal(len(basis))
    v = c @ basis
    return v / np.linalg.norm(v)


def closure_audit(
    spec: GroupSpec,
    records: Sequence[SeedRecord],
    candidates: Sequence[CandidateBeta],
    eps_values: Sequence[float] = (1e-2, 1e-3),
    n_neighbors: int = 6,
    rng_seed: int = 0,
    opts: FlowOptions | None = None,
) -> AuditReport:
    """Empirical check of the closure ordering of strata.

    A record z labelled beta is adjacent to a label beta' when every radius in
    ``eps_values`` yields sampled neighbours labelled beta'.  Then z lies in
    S_beta and (numerically) in the closure of S_beta', which forces
    |beta| > |beta'|; anything else is a violation.
    """
    opts = opts or FlowOptions(record=False)
    eps_values = tuple(float(e) for e in eps_values)
    adjacencies, violations = [], []
    per_eps: dict[float, Counter] = {e: Counter() for e in eps_values}
    unresolved = 0
    for r_i, rec in enumerate(records):
        if rec.label.index is None:
            unresolved += 1
            continue
        rng = seed_rng(rng_seed, 2, r_i)
        seen_per_eps = []
        for eps in eps_values:
            seen = set()
            for _ in range(n_neighbors):
                v = _random_unit_tangent(rec.point, rng)
                # metric norm of v is sqrt(2)|v|; scale so the FS distance is <= eps
                q = geodesic(rec.point, v, eps * rng.uniform(0.2, 1.0))
                lab, _ = classify_point(spec, q, candidates, opts)
                if lab.index is None:
                    unresolved += 1
                    continue
                per_eps[eps][(rec.label.key, lab.key)] += 1
                if lab.index != rec.label.index:
                    seen.add(lab.index)
            seen_per_eps.append(seen)
        common = set.intersection(*seen_per_eps) if seen_per_eps else set()
        for j in sorted(common):
            b, bt = candidates[rec.label.index], candidates[j]
            entry = (r_i, str(rec.label.index), str(j))
            adjacencies.append(entry)
            if not b.norm > bt.norm:
                violations.append(entry)
    return AuditReport(
        eps_values=eps_values,
        points_checked=len(records),
        adjacencies=tuple(adjacencies),
        violations=tuple(violations),
        per_eps_counts={e: dict(c) for e, c in per_eps.items()},
        unresolved=unresolved,
    )


@dataclass(frozen=True, eq=False)
class HessianReport:
    point: ProjPoint
    eigenvalues: np.ndarray
    stratum_eigenvalues: np.ndarray
    normal_eigenvalues: np.ndarray
    codimension: int
    negative_count: int
    passed: bool


def _span_coords(vectors: Sequence[np.ndarray], basis: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal columns (in basis coordinates) spanning the given tangent vectors."""
    m = len(basis)
    if len(vectors) == 0:
        return np.zeros((m, 0))
    cols = np.array([[metric(v, e) for e in basis] for v in vectors]).T
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return u[:, s > tol * max(1.0, s.max() if s.size else 1.0)]


def check_hessian_at_limits(
    spec: GroupSpec,
    trace: FlowTrace,
    real: bool = False,
    tol: float = 1e-8,
) -> HessianReport:
    """Sign pattern of the Hessian of eta_p at a flow terminal.

    The tangent space of the stratum at x is k.x + W^{beta+}; the Hessian
    must be >= 0 there and < 0 on its orthogonal complement.
    """
    if not trace.converged:
        raise NotCriticalError("flow trace did not converge")
    x = trace.terminal
    hess = hessian_eta(spec, x, real=real)
    basis = hess.basis
    # terminal beta carries the flow's stopping error
    td = tangent_decompose(spec, hess.beta, x, real=real, zero_tol=1e-6)
    kx = [vector_field(spec, xi, x) for xi in spec.k_frame]
    q = _span_coords(kx + list(td.nonneg_span), basis)
    m = len(basis)
    full = np.linalg.svd(q, full_matrices=True)[0] if q.shape[1] else np.eye(m)
    q_perp = full[:, q.shape[1]:] if q.shape[1] else np.eye(m)
    h = hess.matrix
    s_eigs = np.linalg.eigvalsh(q.T @ h @ q) if q.shape[1] else np.zeros(0)
    n_eigs = np.linalg.eigvalsh(q_perp.T @ h @ q_perp) if q_perp.shape[1] else np.zeros(0)
    eigs = hess.eigenvalues
    passed = bool(np.all(s_eigs >= -tol) and np.all(n_eigs < -tol))
    return HessianReport(
        point=x,
        eigenvalues=eigs,
        stratum_eigenvalues=s_eigs,
        normal_eigenvalues=n_eigs,
        codimension=int(q_perp.shape[1]),
        negative_count=int(np.sum(eigs < -tol)),
        passed=passed,
    )
