"""Fourier multipliers of the linear flow and their phase-space analysis.

The linear problem with data prescribed at time s is solved per frequency by
the pair (m0, m1): u_hat(t) = m0 g1_hat + m1 g2_hat.  Both multipliers and
their time derivatives are assembled from a 2x2 determinant of Hankel
functions evaluated at

    z_s = (1+s)^(1-ell) |xi| / (1-ell),   z_t = (1+t)^(1-ell) |xi| / (1-ell).

Three algebraically identical determinant forms exist (complex Hankel, J/Y,
and a cross form in J_{+-gamma} for non-integer orders); they differ wildly
in floating-point behaviour.  The dispatcher `psi` picks the stable one:
the cross form kills the exact leading-order cancellation that the J/Y form
suffers when both arguments are small and the order is negative non-integer.

The printed closed form for m0 carries a spurious (1+s)^ell factor relative
to the initial condition m0(s,s) = 1 that the representation formula
requires; `multiplier_eval` reports m0 as printed, and `m0_normalized`
divides the factor out (the normalized value matches the per-mode ODE).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from .bessel import bessel_j, bessel_jy, hankel
from .errors import DomainError, SingularityError

_COINCIDENCE_GAP = 1e-3   # below this z_t - z_s gap the determinant cancels; use the ODE
_SMALL_Z = 2.0            # both-arguments-small threshold for the cross form
_INT_SNAP = 1e-9


@dataclass(frozen=True)
class PhasePoint:
    """A point (t, s, |xi|) of the extended phase space, with the speed exponent."""

    t: float
    s: float
    xi: float
    ell: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.ell < 1.0):
            raise DomainError(f"ell must lie in [0, 1), got {self.ell}")
        if self.s < 0.0 or self.t < self.s:
            raise DomainError(f"need t >= s >= 0, got t={self.t}, s={self.s}")
        if self.xi < 0.0:
            raise DomainError(f"need xi >= 0, got {self.xi}")

    @property
    def z_s(self) -> float:
        return (1.0 + self.s) ** (1.0 - self.ell) * self.xi / (1.0 - self.ell)

    @property
    def z_t(self) -> float:
        return (1.0 + self.t) ** (1.0 - self.ell) * self.xi / (1.0 - self.ell)


class Zone(Enum):
    Z1 = 1
    Z2 = 2
    Z3 = 3


@dataclass(frozen=True)
class MultiplierEval:
    """Values of the multipliers (as printed) at one phase point."""

    m0: complex
    m1: complex
    dt_m0: complex
    dt_m1: complex
    zone: Zone


def zone_classify(point: PhasePoint) -> Zone:
    """High/intermediate/low frequency zone; ties go to the lower-numbered zone."""
    s_thresh = (1.0 + point.s) ** (point.ell - 1.0)
    t_thresh = (1.0 + point.t) ** (point.ell - 1.0)
    if point.xi >= s_thresh:
        return Zone.Z1
    if point.xi < t_thresh:
        return Zone.Z3
    return Zone.Z2


def _chi(r):
    """C-infinity cutoff: 1 on r <= 1/2, 0 on r >= 1, exp(-1/x) glue between."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    out[r <= 0.5] = 1.0
    mid = (r > 0.5) & (r < 1.0)
    if np.any(mid):
        rm = r[mid]
        up = np.exp(-1.0 / (1.0 - rm))
        dn = np.exp(-1.0 / (rm - 0.5))
        out[mid] = up / (up + dn)
    return out if out.ndim else float(out)


def cutoffs(point: PhasePoint) -> tuple[float, float, float]:
    """Partition of unity (chi1, chi2, chi3) built from shared cutoff evaluations."""
    one = 1.0 - point.ell
    a = float(_chi((1.0 + point.s) ** one * point.xi))
    b = float(_chi((1.0 + point.t) ** one * point.xi))
    return 1.0 - a, a * (1.0 - b), a * b


def _near_int(gamma: float) -> bool:
    return abs(gamma - round(gamma)) <= _INT_SNAP


def psi_hankel_form(j: float, gamma: float, delta: float, point: PhasePoint) -> complex:
    """Literal Hankel-determinant definition (unstable deep in the low zone)."""
    a, b = point.z_s, point.z_t
    det = (hankel(-1, gamma, a) * hankel(+1, gamma + delta, b)
           - hankel(+1, gamma, a) * hankel(-1, gamma + delta, b))
    return point.xi ** j * det


def psi_jy_form(j: float, gamma: float, delta: float, point: PhasePoint) -> complex:
    """2i times the J/Y determinant; identical to the Hankel form algebraically."""
    a, b = point.z_s, point.z_t
    ja, ya = bessel_jy(gamma, a)
    jb, yb = bessel_jy(gamma + delta, b)
    return point.xi ** j * 2j * (ja * yb - ya * jb)


def psi_nonint_form(j: float, gamma: float, delta: float, point: PhasePoint) -> complex:
    """Cross form in J_{+-gamma}; valid for non-integer gamma and integer delta."""
    if _near_int(gamma):
        raise DomainError("cross form needs non-integer gamma")
    if abs(delta - round(delta)) > _INT_SNAP:
        raise DomainError("cross form needs integer delta")
    a, b = point.z_s, point.z_t
    sign = -1.0 if int(round(delta)) % 2 else 1.0
    det = (bessel_j(-gamma, a) * bessel_j(gamma + delta, b)
           - sign * bessel_j(gamma, a) * bessel_j(-gamma - delta, b))
    return point.xi ** j * 2j * det / math.sin(math.pi * gamma)


def psi(j: float, gamma: float, delta: float, point: PhasePoint) -> complex:
    """The auxiliary determinant |xi|^j (H-_g(z_s) H+_{g+d}(z_t) - H+_g H-_{g+d}).

    Dispatches between the equivalent forms: the J_{+-gamma} cross form when
    both arguments are small and the order is non-integer (where the J/Y
    products cancel catastrophically), the J/Y determinant otherwise.
    """
    if point.xi == 0.0:
        raise SingularityError("psi undefined at xi = 0; use the zero-frequency form")
    a, b = point.z_s, point.z_t
    delta_int = abs(delta - round(delta)) <= _INT_SNAP
    if (not _near_int(gamma)) and delta_int and a <= _SMALL_Z and b <= _SMALL_Z:
        return psi_nonint_form(j, gamma, delta, point)
    return psi_jy_form(j, gamma, delta, point)


def zero_frequency_m1(t: float, s: float, beta: float) -> float:
    """xi -> 0 limit of m1: the integral of ((1+s)/(1+r))^beta over [s, t]."""
    if t < s:
        raise DomainError(f"need t >= s, got t={t}, s={s}")
    if beta == 1.0:
        return (1.0 + s) * math.log((1.0 + t) / (1.0 + s))
    return ((1.0 + s) / (beta - 1.0)) * (1.0 - ((1.0 + s) / (1.0 + t)) ** (beta - 1.0))


def zero_frequency_dt_m1(t: float, s: float, beta: float) -> float:
    """Time derivative of the zero-frequency m1: ((1+s)/(1+t))^beta."""
    if t < s:
        raise DomainError(f"need t >= s, got t={t}, s={s}")
    return ((1.0 + s) / (1.0 + t)) ** beta


def mode_ode_solution(xi: float, ell: float, beta: float, s: float, t: float,
                      u0: float = 0.0, v0: float = 1.0,
                      rtol: float = 1e-12, atol: float = 1e-14):
    """Independent oracle: integrate one Fourier mode of the linear equation.

    u'' + (beta/(1+t)) u' + (1+t)^(-2 ell) xi^2 u = 0 from (u0, v0) at time s.
    """
    if t == s:
        return float(u0), float(v0)
    k2 = xi * xi

    def rhs(tt, y):
        return (y[1], -((1.0 + tt) ** (-2.0 * ell)) * k2 * y[0]
                - beta / (1.0 + tt) * y[1])

    sol = solve_ivp(rhs, (s, t), (float(u0), float(v0)), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"mode ODE integration failed: {sol.message}")
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def _m1_prefactors(t, s, ell, beta):
    c = math.pi / (2.0 * (1.0 - ell)) * (1.0 + s) ** (0.5 * (beta + 1.0))
    p_m = (1.0 + t) ** (0.5 * (1.0 - beta))
    p_d = (1.0 + t) ** (0.5 * (1.0 - beta) - ell)
    return c, p_m, p_d


def _det_m1(rho: float, a: np.ndarray, b: np.ndarray, want_dt: bool,
            side_a: dict | None = None):
    """Real determinants D0 (for m1) and D1 (for dt m1), stable dispatch.

    D0 = J_r(a) Y_r(b) - Y_r(a) J_r(b)
    D1 = J_r(a) Y_{r-1}(b) - Y_r(a) J_{r-1}(b)
    with the J_{+-r} cross forms substituted where both arguments are small
    and the order is non-integer.  `side_a` may carry cached a-side values
    for repeated calls with identical a (keys 'j', 'y', 'jneg').
    """
    nonint = not _near_int(rho)
    small = (a <= _SMALL_Z) & (b <= _SMALL_Z) if nonint else np.zeros_like(a, bool)
    reg = ~small
    d0 = np.empty_like(a)
    d1 = np.empty_like(a) if want_dt else None
    if side_a is None:
        side_a = {}
    if np.any(reg):
        if "j" in side_a:
            ja, ya = side_a["j"][reg], side_a["y"][reg]
        else:
            ja, ya = bessel_jy(rho, a[reg])
        jb, yb = bessel_jy(rho, b[reg])
        d0[reg] = ja * yb - ya * jb
        if want_dt:
            jb1, yb1 = bessel_jy(rho - 1.0, b[reg])
            d1[reg] = ja * yb1 - ya * jb1
    if np.any(small):
        sgp = math.sin(math.pi * rho)
        if "j" in side_a:
            ja, jna = side_a["j"][small], side_a["jneg"][small]
        else:
            ja = bessel_j(rho, a[small])
            jna = bessel_j(-rho, a[small])
        jb = bessel_j(rho, b[small])
        jnb = bessel_j(-rho, b[small])
        d0[small] = (jna * jb - ja * jnb) / sgp
        if want_dt:
            jb1 = bessel_j(rho - 1.0, b[small])
            jnb1 = bessel_j(1.0 - rho, b[small])
            d1[small] = (jna * jb1 + ja * jnb1) / sgp
    return d0, d1


def m1_dt_m1_arrays(t: float, s: float, xi: np.ndarray, ell: float, beta: float,
                    want_dt: bool = True, side_a: dict | None = None):
    """Vectorized m1 (and optionally dt m1) over an array of positive frequencies.

    Frequencies whose phase gap z_t - z_s (or z_s itself) falls below the
    coincidence threshold are routed through the per-mode ODE oracle.
    """
    if beta <= 1.0:
        raise DomainError(f"multiplier formulas need beta > 1, got {beta}")
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0.0):
        raise SingularityError("m1_dt_m1_arrays needs xi > 0; handle the zero mode separately")
    one = 1.0 - ell
    rho = (1.0 - beta) / (2.0 * one)
    a = (1.0 + s) ** one * xi / one
    b = (1.0 + t) ** one * xi / one
    m1 = np.empty_like(xi)
    dt = np.empty_like(xi) if want_dt else None
    if t == s:
        m1[:] = 0.0
        if want_dt:
            dt[:] = 1.0
        return m1, dt
    bad = (b - a < _COINCIDENCE_GAP) | (a < _COINCIDENCE_GAP)
    good = ~bad
    if np.any(good):
        c, p_m, p_d = _m1_prefactors(t, s, ell, beta)
        sub = {k: v for k, v in side_a.items()} if side_a else None
        if sub:
            sub = {k: v[good] for k, v in sub.items()}
        d0, d1 = _det_m1(rho, a[good], b[good], want_dt, sub)
        m1[good] = c * p_m * d0
        if want_dt:
            dt[good] = c * p_d * xi[good] * d1
    for i in np.flatnonzero(bad):
        u, v = mode_ode_solution(float(xi[i]), ell, beta, s, t)
        m1[i] = u
        if want_dt:
            dt[i] = v
    return m1, dt


def make_side_cache(s: float, xi: np.ndarray, ell: float, beta: float) -> dict:
    """Precompute the s-side Bessel values reused across many output times."""
    one = 1.0 - ell
    rho = (1.0 - beta) / (2.0 * one)
    a = (1.0 + s) ** one * np.asarray(xi, float) / one
    j, y = bessel_jy(rho, a)
    cache = {"j": j, "y": y}
    if not _near_int(rho):
        jneg = np.empty_like(a)
        sm = a <= _SMALL_Z
        if np.any(sm):
            jneg[sm] = bessel_j(-rho, a[sm])
        jneg[~sm] = np.nan  # only consulted on the small-argument mask
        cache["jneg"] = jneg
    else:
        cache["jneg"] = np.full_like(a, np.nan)
    return cache


def multiplier_eval(point: PhasePoint, beta: float) -> MultiplierEval:
    """All four multiplier values (m0 and dt m0 as printed) at one phase point."""
    if beta <= 1.0:
        raise DomainError(f"multiplier formulas need beta > 1, got {beta}")
    t, s, ell = point.t, point.s, point.ell
    one = 1.0 - ell
    rho = (1.0 - beta) / (2.0 * one)
    zone = zone_classify(point)
    norm = (1.0 + s) ** ell
    if point.xi == 0.0:
        return MultiplierEval(
            m0=complex(norm), m1=complex(zero_frequency_m1(t, s, beta)),
            dt_m0=0j, dt_m1=complex(zero_frequency_dt_m1(t, s, beta)), zone=zone)
    if t == s:
        return MultiplierEval(m0=complex(norm), m1=0j, dt_m0=0j, dt_m1=1 + 0j,
                              zone=zone)
    if point.z_t - point.z_s < _COINCIDENCE_GAP or point.z_s < _COINCIDENCE_GAP:
        u1, v1 = mode_ode_solution(point.xi, ell, beta, s, t, 0.0, 1.0)
        u0, v0 = mode_ode_solution(point.xi, ell, beta, s, t, 1.0, 0.0)
        return MultiplierEval(m0=complex(norm * u0), m1=complex(u1),
                              dt_m0=complex(norm * v0), dt_m1=complex(v1),
                              zone=zone)

    def m_jk(j: int, k: int) -> complex:
        pref = (((-1.0) ** k) * math.pi * 1j / (4.0 * one)
                * (1.0 + s) ** (1.0 + 0.5 * (beta - 1.0))
                * (1.0 + t) ** (0.5 * (1.0 - beta) - j * ell))
        return pref * psi(1 + j - k, rho + k - 1, 1 - j - k, point)

    return MultiplierEval(m0=m_jk(0, 0), m1=m_jk(0, 1),
                          dt_m0=m_jk(1, 0), dt_m1=m_jk(1, 1), zone=zone)


def m0_normalized(point: PhasePoint, beta: float) -> complex:
    """m0 with the spurious (1+s)^ell prefactor divided out.

    The printed closed form gives m0(s, s) = (1+s)^ell while the solution
    representation requires 1; this normalization matches the per-mode ODE
    with data (1, 0).
    """
    ev = multiplier_eval(point, beta)
    return ev.m0 / (1.0 + point.s) ** point.ell


def m0_normalization_audit(point: PhasePoint, beta: float) -> dict:
    """Report the printed-m0 discrepancy against the ODE oracle at this point."""
    ev = multiplier_eval(point, beta)
    u0, _ = mode_ode_solution(point.xi, point.ell, beta, point.s, point.t, 1.0, 0.0)
    printed = complex(ev.m0)
    factor = (1.0 + point.s) ** point.ell
    return {
        "m0_printed": printed,
        "m0_normalized": printed / factor,
        "ode_value": u0,
        "printed_over_ode": printed / u0 if u0 != 0 else math.nan,
        "expected_factor": factor,
    }


def lemma1_margins_sampled(k: float, gamma: float, ell: float,
                           t: np.ndarray, s: np.ndarray,
                           xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized phase-lemma margin: ratios and zone labels (1/2/3) per sample."""
    if gamma == 0.0:
        raise DomainError("the phase-space bound requires gamma != 0")
    t = np.asarray(t, float)
    s = np.asarray(s, float)
    xi = np.asarray(xi, float)
    if np.any(xi <= 0) or np.any(s < 0) or np.any(t < s):
        raise DomainError("need xi > 0 and t >= s >= 0")
    one = 1.0 - ell
    a = (1.0 + s) ** one * xi / one
    b = (1.0 + t) ** one * xi / one
    nonint = not _near_int(gamma)
    small = (a <= _SMALL_Z) & (b <= _SMALL_Z) if nonint else np.zeros(a.shape, bool)
    val = np.empty_like(a)
    reg = ~small
    if np.any(reg):
        ja, ya = bessel_jy(gamma, a[reg])
        jb, yb = bessel_jy(gamma, b[reg])
        val[reg] = np.abs(ja * yb - ya * jb)
    if np.any(small):
        ja = bessel_j(gamma, a[small])
        jna = bessel_j(-gamma, a[small])
        jb = bessel_j(gamma, b[small])
        jnb = bessel_j(-gamma, b[small])
        val[small] = np.abs(jna * jb - ja * jnb) / abs(math.sin(math.pi * gamma))
    val *= 2.0 * xi ** k
    s_thresh = (1.0 + s) ** (ell - 1.0)
    t_thresh = (1.0 + t) ** (ell - 1.0)
    zone = np.where(xi >= s_thresh, 1, np.where(xi < t_thresh, 3, 2))
    g = abs(gamma)
    lm1 = ell - 1.0
    rhs = np.empty_like(a)
    z1, z2, z3 = zone == 1, zone == 2, zone == 3
    rhs[z1] = xi[z1] ** (k - 1.0) * (1 + s[z1]) ** (0.5 * lm1) * (1 + t[z1]) ** (0.5 * lm1)
    rhs[z2] = (xi[z2] ** (k - g - 0.5) * (1 + s[z2]) ** (lm1 * g)
               * (1 + t[z2]) ** (0.5 * lm1))
    rhs[z3] = xi[z3] ** k * (1 + s[z3]) ** (lm1 * g) * (1 + t[z3]) ** (-lm1 * g)
    return val / rhs, zone


def lemma1_margin(k: float, gamma: float, point: PhasePoint) -> tuple[float, Zone]:
    """|xi|^k |psi_{0,gamma,0}| divided by the zone-wise bound of the phase lemma."""
    if k < 0.0:
        raise DomainError(f"need k >= 0, got {k}")
    if gamma == 0.0:
        raise DomainError("the phase-space bound requires gamma != 0")
    if point.xi <= 0.0:
        raise SingularityError("lemma1_margin needs xi > 0")
    zone = zone_classify(point)
    value = point.xi ** k * abs(psi(0.0, gamma, 0.0, point))
    t1, s1, xi = 1.0 + point.t, 1.0 + point.s, point.xi
    lm1 = point.ell - 1.0
    g = abs(gamma)
    if zone is Zone.Z1:
        rhs = xi ** (k - 1.0) * s1 ** (0.5 * lm1) * t1 ** (0.5 * lm1)
    elif zone is Zone.Z2:
        rhs = xi ** (k - g - 0.5) * s1 ** (lm1 * g) * t1 ** (0.5 * lm1)
    else:
        rhs = xi ** k * s1 ** (lm1 * g) * t1 ** (-lm1 * g)
    return value / rhs, zone
