"""Pre-strata S_beta = K . S^{beta+}: beta-limits, fixed sets, shifted
semistability and membership searches over K."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from ._integrate import FlowOptions, GradientSystem, integrate
from .candidates import CandidateBeta
from .flow import classify_point, seed_rng
from .lie_core import GroupSpec, ad_decompose
from .proj_geom import (
    NotFixedError,
    ProjPoint,
    act,
    eval_gradient_map,
    vector_field,
)

__all__ = [
    "BetaLimitResult",
    "FixedComponent",
    "Semistability",
    "SemistabilityResult",
    "Membership",
    "MembershipResult",
    "MaximalStratumReport",
    "beta_limit",
    "fixed_set_components",
    "semistable_test",
    "prestratum_membership",
    "verify_maximal_stratum",
    "k_orbit_distance",
    "sample_s_beta_plus",
    "mu_beta",
    "random_k",
    "random_g",
    "FloorSample",
    "FloorReport",
    "value_floor_check",
]

COMPONENT_THRESHOLD = 1e-12


def mu_beta(beta: np.ndarray, x: ProjPoint) -> float:
    """<mu_p(x), beta> for beta in p."""
    z = x.rep
    return float(np.real(np.vdot(z, beta @ z)))


def _eigen(beta: np.ndarray):
    """Eigenvalue clusters of a Hermitian matrix: list of (value, orthonormal columns)."""
    w, v = np.linalg.eigh(0.5 * (beta + beta.conj().T))
    thr = 1e-9 * (1.0 + float(np.max(np.abs(w))) if len(w) else 1.0)
    groups: list[list[int]] = []
    for i in range(len(w)):
        if groups and w[i] - w[groups[-1][-1]] <= thr:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [(float(np.mean(w[g])), v[:, g]) for g in groups]


@dataclass(frozen=True, eq=False)
class BetaLimitResult:
    seed: ProjPoint
    beta: np.ndarray
    limit: ProjPoint | None
    converged: bool
    mu_beta_at_seed: float
    r_value: float
    component_threshold: float = COMPONENT_THRESHOLD


def beta_limit(spec: GroupSpec | None, beta: np.ndarray, seed: ProjPoint) -> BetaLimitResult:
    """p^{beta+}(seed) = lim_{t -> -oo} exp(t beta) . seed in closed form.

    The limit line is the component of the seed in the lowest beta-eigenspace
    it meets.
    """
    beta = np.asarray(beta, dtype=complex)
    if spec is not None and spec.p_residual(beta) > 1e-9 * max(1.0, np.linalg.norm(beta)):
        raise ValueError("beta is not in p")
    z = seed.rep
    cut = COMPONENT_THRESHOLD * np.linalg.norm(z)
    for _, vecs in _eigen(beta):
        comp = vecs @ (vecs.conj().T @ z)
        if np.linalg.norm(comp) > cut:
            limit = ProjPoint(comp)
            return BetaLimitResult(seed, beta, limit, True, mu_beta(beta, seed), mu_beta(beta, limit))
    raise AssertionError("seed has no nonzero component")


@dataclass(frozen=True, eq=False)
class FixedComponent:
    """One component P(E_lambda) of X^beta, E_lambda an eigenspace of beta."""

    eigenvalue: float
    basis: np.ndarray
    representative: ProjPoint
    mu_beta: float
    probe_spread: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def fixed_set_components(
    spec: GroupSpec | None,
    beta: np.ndarray,
    probe_count: int = 10,
    rng: np.random.Generator | None = None,
    real: bool = False,
) -> list[FixedComponent]:
    """Components of X^beta with their constant mu_p^beta values.

    ``probe_spread`` is the range of mu_p^beta over ``probe_count`` random
    points of the component (zero up to round-off).
    """
    rng = rng or np.random.default_rng(0)
    beta = np.asarray(beta, dtype=complex)
    out = []
    for lam, vecs in _eigen(beta):
        if real:
            # real eigenvectors exist for real symmetric beta
            vecs = np.linalg.qr(np.real(vecs * np.exp(-1j * np.angle(vecs[np.argmax(np.abs(vecs), axis=0), range(vecs.shape[1])]))))[0]
        rep = ProjPoint(vecs[:, 0])
        vals = []
        for _ in range(probe_count):
            c = rng.standard_normal(vecs.shape[1]) + (0 if real else 1j * rng.standard_normal(vecs.shape[1]))
            vals.append(mu_beta(beta, ProjPoint(vecs @ c)))
        spread = float(np.ptp(vals)) if vals else 0.0
        out.append(FixedComponent(lam, vecs, rep, mu_beta(beta, rep), spread))
    return out


class Semistability(enum.Enum):
    SEMISTABLE = "semistable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class SemistabilityResult:
    verdict: Semistability
    shifted_eta: float
    terminal: ProjPoint
    steps: int
    converged: bool


def semistable_test(
    spec: GroupSpec,
    beta: np.ndarray,
    x: ProjPoint,
    opts: FlowOptions | None = None,
    zero_tol: float = 1e-8,
    unstable_floor: float = 1e-6,
    fixed_tol: float = 1e-8,
) -> SemistabilityResult:
    """Semistability of x in X^beta for G^beta and the shifted map mu_{p^beta} - beta.

    Flows the norm square of the shifted map.  The infimum over the orbit
    closure is the limit value, so a value below ``zero_tol`` means the closure
    meets the zero fibre; a critical or plateaued value above
    ``unstable_floor`` means it does not.
    """
    beta = np.asarray(beta, dtype=complex)
    res = np.linalg.norm(vector_field(spec, beta, x))
    if res > fixed_tol * (1.0 + np.linalg.norm(beta)):
        raise NotFixedError(res)
    opts = opts or FlowOptions(record=False)
    dec = ad_decompose(spec, beta)
    frame = dec.p_beta
    # beta commutes with itself, so it lies in p^beta
    shift = np.real(np.einsum("kij,ij->k", frame.conj(), beta)) if len(frame) else np.zeros(0)
    system = GradientSystem(frame, shift)
    raw = integrate(system, x.rep, opts)
    e = float(raw.etas[-1])
    terminal = ProjPoint(raw.points[-1])
    if e < zero_tol:
        verdict = Semistability.SEMISTABLE
    elif (raw.converged or raw.stalled) and e > unstable_floor:
        verdict = Semistability.UNSTABLE
    else:
        verdict = Semistability.INCONCLUSIVE
    return SemistabilityResult(verdict, e, terminal, raw.steps, raw.converged)


def _k_element(spec: GroupSpec, theta: np.ndarray) -> np.ndarray:
    return expm(np.tensordot(theta, spec.k_frame, axes=1))


def random_k(spec: GroupSpec, rng: np.random.Generator, scale: float = np.pi) -> np.ndarray:
    return _k_element(spec, rng.uniform(-scale, scale, spec.dim_k))


def random_g(spec: GroupSpec, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """exp(xi) for xi uniform in a box of g = k + p."""
    return expm(np.tensordot(rng.uniform(-scale, scale, len(spec.g_frame)), spec.g_frame, axes=1))


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_FOUND = "not-found"
    REFUTED = "refuted"


@dataclass(frozen=True, eq=False)
class MembershipResult:
    point: ProjPoint
    beta_index: int | None
    verdict: Membership
    witness_k: np.ndarray | None
    residual: float
    semistability: SemistabilityResult | None
    flow_label: int | None = None

    def to_record(self) -> dict:
        k = self.witness_k
        return {
            "point": {"re": self.point.rep.real.tolist(), "im": self.point.rep.imag.tolist()},
            "beta": self.beta_index,
            "verdict": self.verdict.value,
            "witness_k": None if k is None else {"re": k.real.tolist(), "im": k.imag.tolist()},
            "residual": self.residual,
            "shifted_eta": None if self.semistability is None else self.semistability.shifted_eta,
        }


def _lower_projector(beta: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Projectors onto eigenspaces below ||beta||^2 and onto the ||beta||^2 eigenspace."""
    target = float(np.real(np.vdot(beta.ravel(), beta.ravel())))
    n = beta.shape[0]
    lower = np.zeros((n, n), dtype=complex)
    level = np.zeros((n, n), dtype=complex)
    tol = 1e-9 * (1.0 + target)
    for lam, vecs in _eigen(beta):
        p = vecs @ vecs.conj().T
        if lam < target - tol:
            lower += p
        elif abs(lam - target) <= tol:
            level += p
    return lower, level, target


def prestratum_membership(
    spec: GroupSpec,
    beta: CandidateBeta,
    z: ProjPoint,
    opts: FlowOptions | None = None,
    restarts: int = 8,
    rng_seed: int = 0,
    candidates: Sequence[CandidateBeta] | None = None,
    beta_index: int | None = None,
    residual_tol: float = 1e-8,
) -> MembershipResult:
    """Search K for k with k^-1 . z in S^{beta+}.

    S^{beta+} membership means the beta-limit lies at level ||beta||^2 (no
    component below that eigenvalue) and is semistable for the shifted map.
    Restarts are merged deterministically: lowest residual, ties by index.
    With ``candidates`` given, a failed search is cross-checked against the
    flow label, which can refute membership.
    """
    b = beta.matrix(spec)
    lower, level, _ = _lower_projector(b)
    zr = z.rep
    if np.linalg.norm(level) == 0:
        return MembershipResult(z, beta_index, Membership.NOT_FOUND, None, float("inf"), None)

    def resid(theta):
        y = _k_element(spec, theta).conj().T @ zr
        r = lower @ y
        return np.concatenate([r.real, r.imag])

    rng = seed_rng(rng_seed, 3, 0)
    trials = []
    for i in range(restarts):
        theta0 = np.zeros(spec.dim_k) if i == 0 else rng.uniform(-np.pi, np.pi, spec.dim_k)
        if spec.dim_k == 0:
            val = float(np.linalg.norm(resid(theta0)))
            trials.append((val, i, theta0))
            break
        sol = least_squares(resid, theta0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * (spec.dim_k + 1))
        trials.append((float(np.linalg.norm(sol.fun)), i, sol.x))
    trials.sort(key=lambda t: (t[0], t[1]))
    best = None
    for val, _, theta in trials:
        if val > residual_tol:
            break
        k = _k_element(spec, theta)
        y = ProjPoint(k.conj().T @ zr)
        lim = beta_limit(spec, b, y).limit
        if np.linalg.norm(level @ lim.rep) < 1 - 1e-8:
            continue
        ss = semistable_test(spec, b, lim, opts)
        if ss.verdict is Semistability.SEMISTABLE:
            return MembershipResult(z, beta_index, Membership.MEMBER, k, val, ss)
        best = best or (val, k, ss)
    verdict = Membership.NOT_FOUND
    flow_label = None
    if candidates is not None:
        label, _ = classify_point(spec, z, candidates)
        flow_label = label.index
        if label.index is not None and beta_index is not None and label.index != beta_index:
            verdict = Membership.REFUTED
    residual = trials[0][0] if trials else float("inf")
    return MembershipResult(z, beta_index, verdict, None, residual, best[2] if best else None, flow_label)


def sample_s_beta_plus(
    spec: GroupSpec,
    beta: np.ndarray,
    rng: np.random.Generator,
    count: int,
    real: bool = False,
    upper_scale: float = 1.0,
) -> list[ProjPoint]:
    """Random points of X^{beta+} at level ||beta||^2: a nonzero component in
    the ||beta||^2 eigenspace plus arbitrary components above it.  Callers
    confirm S^{beta+} membership with ``semistable_test`` on the limit."""
    beta = np.asarray(beta, dtype=complex)
    target = float(np.real(np.vdot(beta.ravel(), beta.ravel())))
    tol = 1e-9 * (1.0 + target)
    comps = _eigen(beta)
    level = [v for lam, v in comps if abs(lam - target) <= tol]
    upper = [v for lam, v in comps if lam > target + tol]
    if not level:
        return []
    n = spec.n

    def draw(k):
        return rng.standard_normal(k) + (0 if real else 1j * rng.standard_normal(k))

    out = []
    for _ in range(count):
        z = level[0] @ draw(level[0].shape[1])
        for v in upper:
            z = z + upper_scale * rng.uniform() * (v @ draw(v.shape[1]))
        if real:
            z = z.real
        out.append(ProjPoint(np.asarray(z, dtype=complex).reshape(n)))
    return out


def k_orbit_distance(spec: GroupSpec, x: ProjPoint, y: ProjPoint, restarts: int = 6, rng_seed: int = 0) -> tuple[float, np.ndarray]:
    """min over k in K of the Fubini-Study distance from k.x to y, with a minimizing k."""
    xr, yr = x.rep, y.rep

    def resid(theta):
        w = _k_element(spec, theta) @ xr
        # component of k.x orthogonal to y; its norm is sin of the FS distance
        r = w - np.vdot(yr, w) * yr
        return np.concatenate([r.real, r.imag])

    def dist(theta):
        return ProjPoint(_k_element(spec, theta) @ xr).distance(y)

    rng = seed_rng(rng_seed, 4, 0)
    theta = np.zeros(spec.dim_k)
    best = (dist(theta), theta)
    if spec.dim_k == 0:
        return best[0], np.eye(spec.n, dtype=complex)
    for _ in range(restarts):
        if best[0] < 1e-12:
            break
        theta0 = rng.uniform(-np.pi, np.pi, spec.dim_k)
        sol = least_squares(resid, theta0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        d = dist(sol.x)
        if d < best[0]:
            best = (d, sol.x)
    return float(best[0]), _k_element(spec, best[1])


@dataclass(frozen=True, eq=False)
class MaximalStratumReport:
    samples_checked: int
    max_norm_deviation: float
    fixed_by_limit: tuple[bool, ...]
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_maximal_stratum(
    spec: GroupSpec,
    beta_max: CandidateBeta,
    samples: Sequence[ProjPoint],
    group_draws: int = 100,
    rng_seed: int = 0,
    tol: float = 1e-8,
) -> MaximalStratumReport:
    """On a maximal pre-stratum every G-orbit is a K-orbit: |mu_p| stays at
    |beta_max| along G-orbits and the beta-limit fixes each sample."""
    rng = seed_rng(rng_seed, 5, 0)
    target = beta_max.norm
    worst = 0.0
    fixed, bad = [], []
    for i, z in enumerate(samples):
        ev = eval_gradient_map(spec, z)
        if abs(ev.mu_norm - target) > 1e-6 * (1.0 + target):
            continue
        dev = 0.0
        for _ in range(group_draws):
            dev = max(dev, abs(eval_gradient_map(spec, act(random_g(spec, rng), z)).mu_norm - target))
        worst = max(worst, dev)
        lim = beta_limit(spec, ev.mu_p, z).limit
        is_fixed = lim.same_as(z, 1e-8)
        fixed.append(is_fixed)
        if dev > tol or not is_fixed:
            bad.append(i)
    return MaximalStratumReport(len(fixed), worst, tuple(fixed), tuple(bad))


@dataclass(frozen=True, eq=False)
class FloorSample:
    point: ProjPoint
    eta: float
    semistability: SemistabilityResult
    equality_eta: float
    equality_mu_residual: float
    equality_fixed_residual: float

    @property
    def confirmed(self) -> bool:
        return self.semistability.verdict is Semistability.SEMISTABLE


@dataclass(frozen=True, eq=False)
class FloorReport:
    """eta_p >= |beta|^2 / 2 on sampled points of S^{beta+}.

    Equality cases are the shifted-flow terminals of confirmed samples, which
    must lie in M_p(beta) and X^beta.
    """

    beta: np.ndarray
    floor: float
    samples: tuple[FloorSample, ...]
    violations: tuple[int, ...]
    equality_failures: tuple[int, ...]

    @property
    def confirmed_count(self) -> int:
        return sum(s.confirmed for s in self.samples)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.equality_failures


def value_floor_check(
    spec: GroupSpec,
    beta: np.ndarray,
    rng: np.random.Generator,
    count: int,
    opts: FlowOptions | None = None,
    tol: float = 1e-6,
    real: bool = False,
) -> FloorReport:
    beta = np.asarray(beta, dtype=complex)
    floor = 0.5 * float(np.real(np.vdot(beta.ravel(), beta.ravel())))
    samples, violations, eq_fail = [], [], []
    for i, y in enumerate(sample_s_beta_plus(spec, beta, rng, count, real=real)):
        lim = beta_limit(spec, beta, y).limit
        ss = semistable_test(spec, beta, lim, opts)
        ev = eval_gradient_map(spec, y)
        term = eval_gradient_map(spec, ss.terminal)
        mu_res = float(np.linalg.norm(term.mu_p - beta))
        fix_res = float(np.linalg.norm(vector_field(spec, beta, ss.terminal)))
        s = FloorSample(y, ev.eta, ss, term.eta, mu_res, fix_res)
        samples.append(s)
        if not s.confirmed:
            continue
        if ev.eta < floor - tol:
            violations.append(i)
        near = ev.eta <= floor + tol
        if near and (np.linalg.norm(ev.mu_p - beta) > tol or np.linalg.norm(vector_field(spec, beta, y)) > tol):
            eq_fail.append(i)
        elif abs(term.eta - floor) > tol or mu_res > tol or fix_res > tol:
            eq_fail.append(i)
    return FloorReport(beta, floor, tuple(samples), tuple(violations), tuple(eq_fail))
