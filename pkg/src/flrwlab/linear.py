"""Linear propagation on the periodic grid via Fourier multipliers.

The primary path applies m1 (and dt m1) modewise to data (0, g2): the
propagator is diagonal in frequency, so a solve at time t is a single
multiplier evaluation over the |xi| grid plus an inverse transform.  For
general data (g1, g2) the per-mode ODE system is integrated instead, pending
the m0 normalization question (see multipliers).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import GridSpec, SpectralState
from .integrate import integrate_dp54
from .multipliers import (
    m1_dt_m1_arrays,
    make_side_cache,
    zero_frequency_dt_m1,
    zero_frequency_m1,
)
from .params import ModelParams


class LinearPropagator:
    """Multiplier application from a fixed source time s over a fixed grid.

    Caches the s-side Bessel evaluations, which a decay scan reuses across
    every output time.
    """

    def __init__(self, grid: GridSpec, ell: float, beta: float, s: float = 0.0):
        if beta <= 1.0:
            raise DomainError(f"multiplier propagation needs beta > 1, got {beta}")
        self.grid = grid
        self.ell = float(ell)
        self.beta = float(beta)
        self.s = float(s)
        xi = grid.xi_magnitude()
        self._shape = xi.shape
        self._flat_xi = xi.ravel()
        self._pos = self._flat_xi > 0.0
        self._xi_pos = self._flat_xi[self._pos]
        self._side = make_side_cache(self.s, self._xi_pos, self.ell, self.beta)

    def multipliers_at(self, t: float, want_dt: bool = True):
        """(m1, dt_m1) arrays over the spectral layout, zero mode included."""
        if t < self.s:
            raise DomainError(f"need t >= s = {self.s}, got {t}")
        m1 = np.empty_like(self._flat_xi)
        dt = np.empty_like(self._flat_xi) if want_dt else None
        m1_pos, dt_pos = m1_dt_m1_arrays(t, self.s, self._xi_pos, self.ell,
                                         self.beta, want_dt=want_dt,
                                         side_a=self._side)
        m1[self._pos] = m1_pos
        m1[~self._pos] = zero_frequency_m1(t, self.s, self.beta)
        if want_dt:
            dt[self._pos] = dt_pos
            dt[~self._pos] = zero_frequency_dt_m1(t, self.s, self.beta)
            dt = dt.reshape(self._shape)
        return m1.reshape(self._shape), dt

    def apply(self, g2_hat: np.ndarray, t: float, want_dt: bool = True):
        m1, dt = self.multipliers_at(t, want_dt)
        u_hat = m1 * g2_hat
        ut_hat = dt * g2_hat if want_dt else None
        return u_hat, ut_hat


def _linear_rhs(grid: GridSpec, ell: float, beta: float):
    xi2 = grid.xi_magnitude().ravel() ** 2
    n = xi2.size

    def rhs(t, y):
        u, v = y[:n], y[n:]
        speed2 = (1.0 + t) ** (-2.0 * ell)
        return np.concatenate((v, -speed2 * xi2 * u - (beta / (1.0 + t)) * v))

    return rhs


def propagate_linear(state: SpectralState, t: float, params: ModelParams,
                     method: str = "multiplier") -> SpectralState:
    """Propagate a spectral state from its own time to t.

    method 'multiplier' requires vanishing displacement data (the primary
    path, data (0, g2)); 'ode' integrates the per-mode system and accepts
    general data.
    """
    s = state.t
    if t < s:
        raise DomainError(f"need t >= state time {s}, got {t}")
    if t == s:
        return state.copy()
    if method == "multiplier":
        scale = float(np.max(np.abs(state.ut_hat)))
        if float(np.max(np.abs(state.u_hat))) > 1e-12 * max(scale, 1e-300):
            raise ConfigurationError(
                "multiplier path requires zero displacement data; "
                "use method='ode' for general (g1, g2)")
        prop = LinearPropagator(state.grid, params.ell, params.beta, s=s)
        u_hat, ut_hat = prop.apply(state.ut_hat, t)
        return SpectralState(u_hat, ut_hat, float(t), state.grid)
    if method == "ode":
        rhs = _linear_rhs(state.grid, params.ell, params.beta)
        y0 = np.concatenate((state.u_hat.ravel(), state.ut_hat.ravel()))
        xi_max = max(state.grid.xi_max(), 1e-12)

        def cap(tt):
            return 2.5 * (1.0 + tt) ** params.ell / xi_max

        res = integrate_dp54(rhs, s, y0, [t], rtol=1e-10, atol=1e-13, max_step=cap)
        if res.status != "completed":
            raise RuntimeError(f"linear ODE propagation failed: {res.status}")
        n = state.u_hat.size
        shape = state.u_hat.shape
        return SpectralState(res.y[:n].reshape(shape), res.y[n:].reshape(shape),
                             float(t), state.grid)
    raise DomainError(f"unknown propagation method {method!r}")
