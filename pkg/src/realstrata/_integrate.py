"""Adaptive Dormand-Prince 5(4) integration of norm-square gradient flows on
the unit sphere of C^n, with renormalization after every accepted step."""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class FlowError(RuntimeError):
    pass


@dataclass
class FlowOptions:
    """Integrator and stopping controls.

    The step budget defaults to 10^6 steps or a time span of 10^3, whichever
    comes first.  Convergence needs |grad eta| below ``crit_rel * (1 + |mu|)``
    and an eta plateau (spread below ``plateau``) over ``plateau_window``
    accepted steps.
    """

    rtol: float = 1e-9
    atol: float = 1e-12
    h0: float = 0.05
    h_max: float = 2.0
    max_steps: int = 1_000_000
    t_max: float = 1e3
    crit_rel: float = 1e-8
    plateau: float = 1e-12
    plateau_window: int = 5
    monotone_tol: float = 1e-9
    drift_tol: float = 1e-6
    record: bool = True


class GradientSystem:
    """The map z -> nu(z) = mu_frame(z) - shift, with nu in span(frame).

    ``frame`` is an orthonormal stack of Hermitian matrices and ``shift`` the
    frame coordinates of a fixed element (zero for the plain gradient map).
    """

    def __init__(self, frame: np.ndarray, shift: np.ndarray | None = None):
        self.frame = np.asarray(frame, dtype=complex)
        d = len(self.frame)
        self.n = self.frame.shape[-1]
        self._flat = self.frame.conj().reshape(d, -1)
        self.shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)

    def coords(self, z: np.ndarray) -> np.ndarray:
        if len(self.frame) == 0:
            return np.zeros(0)
        c = np.real(self._flat @ np.outer(z, z.conj()).ravel()) / np.real(np.vdot(z, z))
        return c - self.shift

    def value(self, z: np.ndarray) -> np.ndarray:
        c = self.coords(z)
        if len(c) == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        return np.tensordot(c, self.frame, axes=1)

    def eta(self, z: np.ndarray) -> float:
        c = self.coords(z)
        return 0.5 * float(c @ c)

    def velocity(self, z: np.ndarray) -> np.ndarray:
        """-nu(z)_X(z), the negative gradient of eta at z."""
        w = self.value(z) @ z
        return -(w - np.vdot(z, w) * z)


@dataclass
class RawTrace:
    times: np.ndarray
    points: np.ndarray
    etas: np.ndarray
    grad_norms: np.ndarray
    converged: bool
    stalled: bool
    steps: int
    rejected: int
    wall_time: float


def integrate(system: GradientSystem, z0: np.ndarray, opts: FlowOptions, real: bool = False) -> RawTrace:
    t0 = time.perf_counter()
    z = np.asarray(z0, dtype=complex)
    z = z / np.linalg.norm(z)
    if real:
        if np.abs(z.imag).max() > opts.drift_tol:
            raise FlowError("seed is not on the real locus")
        z = z.real.astype(complex)
    k1 = system.velocity(z)
    e = system.eta(z)
    g = np.sqrt(2.0) * np.linalg.norm(k1)
    times, points, etas, grads = [0.0], [z.copy()], [e], [g]
    window: deque[float] = deque([e], maxlen=max(2, opts.plateau_window + 1))

    def crit(eta_val: float, gnorm: float) -> bool:
        return gnorm < opts.crit_rel * (1.0 + np.sqrt(2.0 * max(eta_val, 0.0)))

    if crit(e, g):
        return RawTrace(np.array(times), np.array(points), np.array(etas), np.array(grads), True, False, 0, 0, time.perf_counter() - t0)

    t, h, steps, rejected = 0.0, opts.h0, 0, 0
    converged = stalled = False
    while steps < opts.max_steps and t < opts.t_max:
        h = min(h, opts.h_max, opts.t_max - t)
        ks = [k1]
        for s in range(1, 7):
            y = z + h * sum(a * k for a, k in zip(_A[s], ks))
            ks.append(system.velocity(y))
        y5 = z + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
        err = h * sum(c * k for c, k in zip(_E, ks))
        scale = opts.atol + opts.rtol * np.maximum(np.abs(z), np.abs(y5))
        errnorm = float(np.max(np.abs(err) / scale))
        if errnorm <= 1.0:
            znew = y5 / np.linalg.norm(y5)
            if real:
                drift = float(np.abs(znew.imag).max())
                if drift > opts.drift_tol:
                    raise FlowError(f"trajectory left the real locus (drift {drift:.3e} at t={t:.4g})")
                znew = znew.real.astype(complex)
                znew /= np.linalg.norm(znew)
            enew = system.eta(znew)
            if enew > e + opts.monotone_tol:
                rejected += 1
                h *= 0.5
                continue
            t += h
            steps += 1
            z, e = znew, enew
            k1 = system.velocity(z)
            g = np.sqrt(2.0) * np.linalg.norm(k1)
            window.append(e)
            if opts.record:
                times.append(t)
                points.append(z.copy())
                etas.append(e)
                grads.append(g)
            plateau = len(window) == window.maxlen and (max(window) - min(window)) < opts.plateau
            if crit(e, g) and plateau:
                converged = True
                break
            stalled = plateau and not crit(e, g)
        else:
            rejected += 1
        factor = 0.9 * errnorm ** (-0.2) if errnorm > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if h < 1e-14:
            raise FlowError(f"step size underflow at t={t:.4g}")
    if not opts.record:
        times.append(t)
        points.append(z.copy())
        etas.append(e)
        grads.append(g)
    return RawTrace(
        np.array(times),
        np.array(points),
        np.array(etas),
        np.array(grads),
        converged,
        stalled,
        steps,
        rejected,
        time.perf_counter() - t0,
    )
