"""Periodic grids, spectral states, initial data and L^q norms.

Fields live on a uniform periodic grid in 1 or 2 dimensions and are stored
as real-FFT coefficient arrays, which keeps the Hermitian symmetry of real
fields structural.  The domain must out-run the propagation cone: the speed
(1+t)^(-ell) integrates to a finite causal radius that, plus the data
support, has to fit inside half_length (checked before any compute).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


def causal_radius(ell: float, horizon: float, t_start: float = 0.0) -> float:
    """Distance travelled between t_start and horizon: integral of (1+t)^(-ell)."""
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    if horizon < t_start or t_start < 0:
        raise DomainError(f"need horizon >= t_start >= 0, got {horizon}, {t_start}")
    one = 1.0 - ell
    return ((1.0 + horizon) ** one - (1.0 + t_start) ** one) / one


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-half_length, half_length)^dim."""

    dim: int
    points_per_axis: int
    half_length: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigurationError(f"supported dimensions are 1 and 2, got {self.dim}")
        n = self.points_per_axis
        if n < 4 or (n & (n - 1)) != 0:
            raise ConfigurationError(f"points_per_axis must be a power of two >= 4, got {n}")
        if self.half_length <= 0:
            raise ConfigurationError(f"half_length must be positive, got {self.half_length}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.dim

    @property
    def shape_phys(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def shape_spec(self) -> tuple:
        n = self.points_per_axis
        return (n // 2 + 1,) if self.dim == 1 else (n, n // 2 + 1)

    def axis(self) -> np.ndarray:
        n = self.points_per_axis
        return -self.half_length + self.dx * np.arange(n)

    def radius_grid(self) -> np.ndarray:
        x = self.axis()
        if self.dim == 1:
            return np.abs(x)
        return np.hypot(x[:, None], x[None, :])

    def xi_magnitude(self) -> np.ndarray:
        """|xi| over the real-FFT layout (angular wavenumbers)."""
        n, d = self.points_per_axis, self.dx
        kr = 2.0 * np.pi * np.fft.rfftfreq(n, d)
        if self.dim == 1:
            return kr
        kf = 2.0 * np.pi * np.fft.fftfreq(n, d)
        return np.hypot(kf[:, None], kr[None, :])

    def xi_max(self) -> float:
        return float(np.pi / self.dx) * (np.sqrt(2.0) if self.dim == 2 else 1.0)

    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule mask over the real-FFT layout."""
        n = self.points_per_axis
        keep = n // 3
        idx_r = np.arange(n // 2 + 1)
        if self.dim == 1:
            return idx_r <= keep
        idx_f = np.abs(np.fft.fftfreq(n) * n).astype(int)
        return (idx_f[:, None] <= keep) & (idx_r[None, :] <= keep)

    def validate_causal_budget(self, ell: float, horizon: float,
                               support_radius: float, t_start: float = 0.0) -> None:
        need = causal_radius(ell, horizon, t_start) + support_radius
        if self.half_length <= need:
            raise ConfigurationError(
                f"half_length {self.half_length} cannot contain the propagation "
                f"cone: needs > {need} (causal radius + data support) for "
                f"horizon {horizon}")


def irfft_phys(arr_hat: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Inverse real FFT back to the physical grid."""
    axes = tuple(range(grid.dim))
    return np.fft.irfftn(arr_hat, s=grid.shape_phys, axes=axes)


def bump(grid: GridSpec, delta: float, width: float = 1.0) -> np.ndarray:
    """Compactly supported C-infinity bump delta * exp(-1/(1-(r/w)^2)) on r < w."""
    if delta <= 0 or width <= 0:
        raise ConfigurationError("bump needs positive amplitude and width")
    r = grid.radius_grid() / width
    out = np.zeros(grid.shape_phys)
    inside = r < 1.0
    out[inside] = delta * np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


@dataclass
class SpectralState:
    """(u_hat, ut_hat) in real-FFT layout at time t on a grid."""

    u_hat: np.ndarray
    ut_hat: np.ndarray
    t: float
    grid: GridSpec

    @classmethod
    def from_physical(cls, u: np.ndarray, ut: np.ndarray, grid: GridSpec,
                      t: float = 0.0) -> "SpectralState":
        if u.shape != grid.shape_phys or ut.shape != grid.shape_phys:
            raise ConfigurationError("field shape does not match the grid")
        return cls(np.fft.rfftn(u), np.fft.rfftn(ut), float(t), grid)

    def physical_u(self) -> np.ndarray:
        return irfft_phys(self.u_hat, self.grid)

    def physical_ut(self) -> np.ndarray:
        return irfft_phys(self.ut_hat, self.grid)

    def copy(self) -> "SpectralState":
        return SpectralState(self.u_hat.copy(), self.ut_hat.copy(), self.t, self.grid)


def lq_norm_field(u: np.ndarray, grid: GridSpec, q: float) -> float:
    """Riemann-sum L^q norm of a physical field (deterministic pairwise sums)."""
    if q < 1.0:
        raise DomainError(f"lq_norm needs q >= 1, got {q}")
    a = np.abs(u)
    if np.isinf(q):
        return float(np.max(a))
    return float(np.sum(a ** q) * grid.cell_volume) ** (1.0 / q)


def lq_norm(state: SpectralState, q: float) -> float:
    """L^q norm of the displacement field of a spectral state."""
    return lq_norm_field(state.physical_u(), state.grid, q)


def norms_row(u: np.ndarray, grid: GridSpec, q_list) -> dict:
    """One inverse transform, several norms: {'l2':, 'linf':, 'lq_<q>':}."""
    row = {"l2": lq_norm_field(u, grid, 2.0), "linf": lq_norm_field(u, grid, np.inf)}
    for q in q_list:
        if q in (2, 2.0):
            row[f"lq_{_qkey(q)}"] = row["l2"]
        elif np.isinf(q):
            row[f"lq_{_qkey(q)}"] = row["linf"]
        else:
            row[f"lq_{_qkey(q)}"] = lq_norm_field(u, grid, float(q))
    return row


def _qkey(q) -> str:
    if np.isinf(q):
        return "inf"
    qf = float(q)
    return str(int(qf)) if qf == int(qf) else str(qf)
