"""Adaptive Dormand-Prince 5(4) integration for complex spectral states.

One embedded explicit Runge-Kutta pair with FSAL, a PI-flavoured step
controller, an optional state-dependent step ceiling (used as a CFL-type
stability cap for wave systems), and exact landing on requested output
times.  A fixed-step driver is provided for convergence-order studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


@dataclass
class IntegrationResult:
    status: str                 # "completed" | "stopped" | "step_underflow" | "nonfinite"
    t_reached: float
    y: np.ndarray               # state at t_reached
    n_steps: int = 0
    n_rejected: int = 0
    outputs: list = field(default_factory=list)   # (t, sink result) when recording


def _err_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray,
              rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    r = np.abs(err) / scale
    return float(np.sqrt(np.mean(r * r)))


def _initial_step(rhs, t0, y0, f0, rtol, atol, cap):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, cap)
    y1 = y0 + h0 * f0
    f1 = rhs(t0 + h0, y1)
    d2 = float(np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    m = max(d1, d2)
    h1 = max(1e-6, (0.01 / m) ** 0.2) if m > 1e-15 else h0 * 100
    return min(100 * h0, h1, cap)


def integrate_dp54(rhs: Callable, t0: float, y0: np.ndarray, t_out,
                   rtol: float = 1e-8, atol: float = 1e-12,
                   max_step: Optional[Callable[[float], float]] = None,
                   sink: Optional[Callable[[float, np.ndarray], bool]] = None,
                   store: bool = False) -> IntegrationResult:
    """Integrate y' = rhs(t, y) hitting every time in t_out exactly.

    ``sink(t, y)`` is called at each output time; returning False stops the
    run (status "stopped").  With ``store`` the outputs list accumulates
    (t, y.copy()).  Nonfinite stages trigger step halving and, failing that,
    status "nonfinite"; a collapsed step size gives "step_underflow".
    """
    t_out = np.atleast_1d(np.asarray(t_out, dtype=float))
    if np.any(np.diff(t_out) <= 0):
        raise ValueError("t_out must be strictly increasing")
    if t_out[0] < t0:
        raise ValueError("t_out must start at or after t0")
    y = np.array(y0, copy=True)
    t = float(t0)
    res = IntegrationResult(status="completed", t_reached=t, y=y)

    def emit(tt, yy) -> bool:
        if store:
            res.outputs.append((tt, yy.copy()))
        if sink is not None:
            return bool(sink(tt, yy))
        return True

    i_out = 0
    if t_out[0] == t0:
        if not emit(t, y):
            res.status = "stopped"
            res.t_reached = t
            res.y = y
            return res
        i_out = 1
    if i_out >= t_out.size:
        res.t_reached = t
        res.y = y
        return res

    t_end = float(t_out[-1])
    cap0 = max_step(t) if max_step else np.inf
    f = rhs(t, y)
    h = _initial_step(rhs, t, y, f, rtol, atol, min(cap0, t_end - t))
    k = [None] * 7
    k[0] = f
    while t < t_end:
        hmin = 1e-13 * max(1.0, abs(t))
        cap = max_step(t) if max_step else np.inf
        h = min(h, cap, t_end - t)
        land = False
        if t + h >= t_out[i_out] - 1e-14 * max(1.0, abs(t)):
            h = t_out[i_out] - t
            land = True
        if h < hmin:
            res.status = "step_underflow"
            break

        bad = False
        for i in range(1, 7):
            acc = k[0] * _A[i][0]
            for j in range(1, i):
                if _A[i][j] != 0.0:
                    acc = acc + k[j] * _A[i][j]
            k[i] = rhs(t + _C[i] * h, y + h * acc)
        y1 = y + h * (k[0] * _B5[0] + k[2] * _B5[2] + k[3] * _B5[3]
                      + k[4] * _B5[4] + k[5] * _B5[5])
        err = h * (k[0] * _E[0] + k[2] * _E[2] + k[3] * _E[3]
                   + k[4] * _E[4] + k[5] * _E[5] + k[6] * _E[6])
        if not (np.all(np.isfinite(y1.view(float)))
                and np.all(np.isfinite(err.view(float)))):
            bad = True
            enorm = np.inf
        else:
            enorm = _err_norm(err, y, y1, rtol, atol)

        if enorm <= 1.0:
            t = t + h
            y = y1
            k[0] = k[6]   # FSAL
            res.n_steps += 1
            if land:
                t = float(t_out[i_out])
                if not emit(t, y):
                    res.status = "stopped"
                    break
                i_out += 1
                if i_out >= t_out.size:
                    break
            factor = _MAX_FACTOR if enorm == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * enorm ** -0.2))
            h = h * factor
        else:
            res.n_rejected += 1
            if bad:
                h = 0.5 * h
            else:
                h = h * max(_MIN_FACTOR, _SAFETY * enorm ** -0.2)
            if h < hmin:
                res.status = "nonfinite" if bad else "step_underflow"
                break
            # k[0] still holds rhs(t, y); retry from the same point
    res.t_reached = t
    res.y = y
    return res


def integrate_dp54_fixed(rhs: Callable, t0: float, y0: np.ndarray,
                         t1: float, n_steps: int) -> np.ndarray:
    """Fixed-step DP54 (5th-order propagating solution), for order studies."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    h = (t1 - t0) / n_steps
    y = np.array(y0, copy=True)
    t = t0
    for _ in range(n_steps):
        k = [rhs(t, y)]
        for i in range(1, 7):
            acc = k[0] * _A[i][0]
            for j in range(1, i):
                if _A[i][j] != 0.0:
                    acc = acc + k[j] * _A[i][j]
            k.append(rhs(t + _C[i] * h, y + h * acc))
        y = y + h * (k[0] * _B5[0] + k[2] * _B5[2] + k[3] * _B5[3]
                     + k[4] * _B5[4] + k[5] * _B5[5])
        t += h
    return y
