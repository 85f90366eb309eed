"""Critical-exponent and decay-rate algebra.

Pure closed-form functions: Fujita/Strauss exponents, the damping
thresholds, and the piecewise decay-rate predictions for the linear and
semilinear problems.  Nothing here simulates; everything evaluates in
microseconds and is safe for unsynchronized concurrent use.

Conventions
-----------
* ``q = math.inf`` is accepted wherever a Lebesgue index appears and makes
  ``1/q`` evaluate to 0.
* Branch selections at thresholds use exact rational arithmetic when every
  participating argument is an ``int`` or ``fractions.Fraction``; floats are
  compared inside a 1e-12 relative band, with ties resolved to the equality
  (logarithmic) branch.
* ``beta = 1`` is rejected by the rate predictions: the a-priori estimates
  assume ``beta > 1`` and the Bessel order would degenerate to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, RegimeError

Number = Union[int, float, Fraction]

_BAND = 1e-12


@dataclass(frozen=True)
class RatePrediction:
    """A predicted decay rate ``(1+t)^t_exponent (1+s)^s_exponent log^log_power``.

    ``log_power`` is the exponent on the logarithmic factor (0 when absent)
    and ``case_tag`` names the estimate branch that produced the prediction.
    """

    t_exponent: float
    s_exponent: float
    log_power: float
    case_tag: str


def _maybe_frac(v: Number) -> Optional[Fraction]:
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    return None


def _sign(a_float: float, b_float: float,
          a_frac: Optional[Fraction], b_frac: Optional[Fraction]) -> int:
    """Sign of a - b: exact on rationals, 1e-12 relative band on floats."""
    if a_frac is not None and b_frac is not None:
        return (a_frac > b_frac) - (a_frac < b_frac)
    tol = _BAND * max(1.0, abs(a_float), abs(b_float))
    d = a_float - b_float
    if abs(d) <= tol:
        return 0
    return 1 if d > 0.0 else -1


def _inv_q(q: Number) -> float:
    if q == math.inf:
        return 0.0
    return 1.0 / float(q)


def _inv_q_frac(q: Number) -> Optional[Fraction]:
    if q == math.inf:
        return Fraction(0)
    f = _maybe_frac(q)
    return None if f is None or f == 0 else 1 / f


def fujita_exponent(d: float) -> float:
    """Fujita exponent p_F(d) = 1 + 2/d for effective dimension d > 0."""
    if d <= 0:
        raise DomainError(f"effective dimension must be positive, got {d}")
    return 1.0 + 2.0 / float(d)


def _positive_quadratic_root(a: float, b: float, c: float) -> float:
    """Positive root of a*p^2 + b*p + c with a > 0, c < 0, cancellation-safe."""
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise DomainError("quadratic has no real root")
    sq = math.sqrt(disc)
    qq = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    r1 = qq / a
    r2 = c / qq
    return max(r1, r2)


def strauss_generalized(n: int, ell: float, beta: float) -> float:
    """Generalized Strauss exponent p_S(n, ell, beta).

    Positive root of
        (n - 1 + (beta-ell)/(1-ell)) p^2 - (n + 1 + (beta+3 ell)/(1-ell)) p - 2 = 0.
    """
    ell = float(ell)
    beta = float(beta)
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    one = 1.0 - ell
    a = n - 1 + (beta - ell) / one
    if a <= 0.0:
        raise RegimeError(
            f"leading coefficient n-1+(beta-ell)/(1-ell) = {a} <= 0; root undefined"
        )
    b = -(n + 1 + (beta + 3.0 * ell) / one)
    return _positive_quadratic_root(a, b, -2.0)


def strauss_classic(d: float) -> float:
    """Classical Strauss exponent: positive root of (d-1)p^2 - (d+1)p - 2 = 0."""
    d = float(d)
    if d <= 1.0:
        raise DomainError(f"strauss_classic needs d > 1, got {d}")
    return _positive_quadratic_root(d - 1.0, -(d + 1.0), -2.0)


def beta_star(n: int) -> float:
    """Damping level beta_* = (n^2 + n + 2)/(n + 2) at which p_F(n) = p_S(n + beta_*)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return (n * n + n + 2.0) / (n + 2.0)


def fujita_effective(n: int, ell: float) -> float:
    """p_c(n, ell) = p_F(n (1-ell)), the critical power of the damped model."""
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    return fujita_exponent(n * (1.0 - ell))


def beta_critical(n: int, ell: float) -> float:
    """Damping threshold beta_c(n, ell) where p_S(n, ell, beta_c) = p_c(n, ell).

    Evaluates both equivalent closed forms and checks they agree.
    """
    ell = float(ell)
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    one = 1.0 - ell
    p_c = fujita_effective(n, ell)
    form1 = ell + one * (n + 1.0 - 2.0 / p_c)
    form2 = (n * n * one * one + n * one * (1.0 + 2.0 * ell) + 2.0) / (2.0 + n * one)
    if abs(form1 - form2) > 1e-12 * max(1.0, abs(form1)):
        raise AssertionError(f"beta_critical closed forms disagree: {form1} vs {form2}")
    return form1


def theorem2_beta_threshold(n: int, ell: float) -> float:
    """Damping threshold ell + n(1-ell)(1+ell) of the higher-regularity theorem."""
    ell = float(ell)
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    return ell + n * (1.0 - ell) * (1.0 + ell)


def q_sharp(n: int) -> float:
    """q_# = 2(n+1)/(n-1); requires n >= 2."""
    if n < 2:
        raise DomainError(f"q_sharp requires n >= 2, got {n}")
    return 2.0 * (n + 1.0) / (n - 1.0)


def q_bar(n: int, ell: float) -> float:
    """q_bar = 2 (n p_c(n, ell) - 1)/(n + 1), fixed point of p_c * r(q) = q."""
    p_c = fujita_effective(n, ell)
    return 2.0 * (n * p_c - 1.0) / (n + 1.0)


def r_of_q(n: int, q: Number) -> float:
    """Solve n/r = 1/2 + n/2 + 1/q for r."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    iq = _inv_q(q)
    if q != math.inf and float(q) < 2.0 - _BAND:
        raise DomainError(f"r_of_q requires q >= 2, got {q}")
    return n / (0.5 + 0.5 * n + iq)


def d_exponent(r: float, q: Number, n: int) -> float:
    """Piecewise exponent d(r, q) split at r = q' (both branches agree there)."""
    r = float(r)
    iq = _inv_q(q)
    qf = math.inf if q == math.inf else float(q)
    if r < 1.0 or qf < r:
        raise DomainError(f"need 1 <= r <= q, got r={r}, q={q}")
    if qf == math.inf:
        qprime = 1.0
    elif qf == 1.0:
        qprime = math.inf
    else:
        qprime = qf / (qf - 1.0)
    if r <= qprime:
        return n / r - 0.5 * (n - 1.0) - iq
    return 1.0 / r + 0.5 * (n - 1.0) - n * iq


def _admissible_m(n: int, q: Number, k: float, m: Optional[Number]) -> float:
    """Validate (or choose) the auxiliary data index m in [1, 2] for k in [0, 1)."""
    iq = _inv_q(q)
    if iq > 0:
        lower = n * float(q) / (n + float(q) * (1.0 - k))
    else:
        lower = n / (1.0 - k)
    if m is None:
        if lower < 1.0:
            return 1.0
        if lower < 2.0:
            return 0.5 * (lower + 2.0)
        raise DomainError(
            f"no admissible m in [1,2]: need m > {lower} for (n={n}, q={q}, k={k})"
        )
    mf = float(m)
    if not (1.0 <= mf <= 2.0):
        raise DomainError(f"m must lie in [1, 2], got {m}")
    if mf <= lower:
        raise DomainError(f"inadmissible m={m}: need m > nq/(n+q(1-k)) = {lower}")
    return mf


def linear_rate(n: int, ell: Number, beta: Number, q: Number,
                k: Number = 0, m: Optional[Number] = None,
                at_s: float = 0.0) -> RatePrediction:
    """A-priori decay prediction for the linear flow with data (0, g2).

    Returns the dominant-term exponents of the three-case estimate: for
    ``k`` in [0, 1) the |D|^k L^q bound, for ``k >= 1`` the homogeneous
    H^k bound (stated at q = 2).  ``at_s`` is carried for callers that
    evaluate the (1+s) prefactor; it does not alter the exponents.
    """
    del at_s
    ellf, betaf, kf = float(ell), float(beta), float(k)
    if not (0.0 <= ellf < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    if kf < 0.0:
        raise DomainError(f"k must be >= 0, got {k}")
    ell_f, beta_f, k_f = _maybe_frac(ell), _maybe_frac(beta), _maybe_frac(k)
    if _sign(betaf, 1.0, beta_f, Fraction(1)) <= 0:
        raise RegimeError(f"linear_rate requires beta > 1, got {beta}")
    iq = _inv_q(q)
    iq_f = _inv_q_frac(q)
    if q != math.inf and float(q) < 2.0 - _BAND:
        raise DomainError(f"q must be >= 2, got {q}")
    if kf < 1.0:
        _admissible_m(n, q, kf, m)
        order = n * (1.0 - iq) + kf
    else:
        if q != 2:
            raise DomainError("k >= 1 estimates are stated in H^k, pass q = 2")
        order = 0.5 * n + kf

    thresh = ellf + 2.0 * n * (1.0 - ellf) * (1.0 - iq) + 2.0 * kf * (1.0 - ellf)
    thresh_f = None
    if ell_f is not None and k_f is not None and iq_f is not None:
        thresh_f = ell_f + 2 * n * (1 - ell_f) * (1 - iq_f) + 2 * k_f * (1 - ell_f)
    sgn = _sign(betaf, thresh, beta_f, thresh_f)

    if sgn < 0:
        return RatePrediction(
            t_exponent=0.5 * (ellf - betaf),
            s_exponent=1.0 + 0.5 * (betaf - ellf) + (ellf - 1.0) * order,
            log_power=0.0,
            case_tag="PropLq-i",
        )
    t_exp = (ellf - 1.0) * order
    if sgn == 0:
        log_power = 0.5 if kf >= 1.0 else 1.0 - iq
        return RatePrediction(t_exp, 1.0, log_power, "PropLq-ii")
    return RatePrediction(t_exp, 1.0, 0.0, "PropLq-iii")


def theorem1_rate(n: int, ell: Number, beta: Number, q: Number,
                  eps: float = 0.0, variant: str = "as_printed") -> RatePrediction:
    """L^q decay prediction of the sharp low-regularity global-existence theorem.

    Above the q-dependent damping threshold the rate is
    ``-n(1-1/q)(1-ell)``; in the intermediate band the printed estimate
    carries an eps slack and a trailing term whose normalization is
    ambiguous (see the module notes): ``variant='as_printed'`` uses
    ``-(beta-ell)/(2(1-ell))``, ``variant='tau_consistent'`` uses
    ``-(beta-ell)/2`` as dictated by the change of time variable.
    """
    if variant not in ("as_printed", "tau_consistent"):
        raise DomainError(f"unknown variant {variant!r}")
    if eps < 0.0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    ellf, betaf = float(ell), float(beta)
    if n < 2:
        raise DomainError("theorem1_rate is stated for n >= 2")
    if not (0.0 <= ellf < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    p_c = fujita_effective(n, ellf)
    qs = q_sharp(n)
    qf = math.inf if q == math.inf else float(q)
    if not (p_c - _BAND <= qf <= qs + _BAND):
        raise DomainError(f"q must lie in [p_c, q_sharp] = [{p_c}, {qs}], got {q}")
    one = 1.0 - ellf
    iq = _inv_q(q)
    low = ellf + (n + 1.0) * one - (2.0 / q_bar(n, ellf)) * one
    if betaf < low - _BAND * max(1.0, abs(low)):
        raise RegimeError(f"beta = {beta} below the theorem threshold {low}")
    high = ellf + (n + 1.0) * one - 2.0 * iq * one
    ell_f, iq_f, beta_f = _maybe_frac(ell), _inv_q_frac(q), _maybe_frac(beta)
    high_f = None
    if ell_f is not None and iq_f is not None:
        high_f = ell_f + (n + 1) * (1 - ell_f) - 2 * iq_f * (1 - ell_f)
    sgn = _sign(betaf, high, beta_f, high_f)
    if sgn > 0:
        return RatePrediction(-n * (1.0 - iq) * one, 0.0, 0.0, "Thm1-a")
    tail = (betaf - ellf) / (2.0 * one) if variant == "as_printed" else 0.5 * (betaf - ellf)
    t_exp = (eps - (n - 1.0) * (0.5 - iq)) * one - tail
    return RatePrediction(t_exp, 0.0, 0.0, "Thm1-b")


def theorem2_rate(n: int, ell: Number, beta: Number, norm: str = "L2",
                  k: Optional[Number] = None,
                  enforce_hypotheses: bool = True) -> RatePrediction:
    """Decay prediction of the higher-regularity theorem (L^2 and H^k norms).

    ``k`` defaults to the theorem's regularity 1 + n*ell/2.  With
    ``enforce_hypotheses=False`` the closed forms are evaluated outside the
    stated (n, ell, beta) window, for exploratory comparisons.
    """
    ellf, betaf = float(ell), float(beta)
    if not (0.0 <= ellf < 1.0):
        raise DomainError(f"ell must lie in [0, 1), got {ell}")
    kf = 1.0 + 0.5 * n * ellf if k is None else float(k)
    if enforce_hypotheses:
        if n < 2:
            raise RegimeError("theorem2_rate hypotheses need n >= 2")
        if 2 <= n <= 4:
            if not (ellf > 1.0 - 2.0 / n):
                raise RegimeError(f"need ell > 1 - 2/n = {1.0 - 2.0 / n}, got {ell}")
        else:
            lo = 0.5 * (1.0 + math.sqrt(1.0 - 16.0 / (n * n)))
            if ellf < lo - _BAND:
                raise RegimeError(f"need ell >= {lo}, got {ell}")
        thr = theorem2_beta_threshold(n, ellf)
        if betaf < thr - _BAND * max(1.0, abs(thr)):
            raise RegimeError(f"need beta >= {thr}, got {beta}")
        p_c = fujita_effective(n, ellf)
        if kf > p_c + _BAND:
            raise RegimeError(f"need k = 1 + n ell/2 <= p_c = {p_c}, got k = {kf}")
    if norm == "L2":
        return RatePrediction(0.5 * n * (ellf - 1.0), 0.0, 0.0, "Thm2-L2")
    if norm != "Hk":
        raise DomainError(f"norm must be 'L2' or 'Hk', got {norm!r}")
    thresh = ellf + n * (1.0 - ellf) + 2.0 * kf * (1.0 - ellf)
    ell_f, beta_f, k_f = _maybe_frac(ell), _maybe_frac(beta), _maybe_frac(k)
    thresh_f = None
    if ell_f is not None and k_f is not None:
        thresh_f = ell_f + n * (1 - ell_f) + 2 * k_f * (1 - ell_f)
    sgn = _sign(betaf, thresh, beta_f, thresh_f)
    if sgn > 0:
        return RatePrediction((ellf - 1.0) * (0.5 * n + kf), 0.0, 0.0, "Thm2-Hk-a")
    if sgn == 0:
        return RatePrediction(0.5 * (ellf - betaf), 0.0, 0.5, "Thm2-Hk-b")
    return RatePrediction(0.5 * (ellf - betaf), 0.0, 0.0, "Thm2-Hk-c")


def abbicco_rate(n: int, mu: Number, q: Number, eps: float = 0.0) -> RatePrediction:
    """(L^1 cap L^2) -> L^q decay for the constant-speed problem in tau time.

    ``t_exponent`` is the power of (1+tau).  The admissible q range is
    dimension-dependent, with the n = 2 lower endpoint closed at q = 2.
    """
    muf = float(mu)
    if muf < 2.0 - _BAND:
        raise DomainError(f"abbicco_rate requires mu >= 2, got {mu}")
    if eps < 0.0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    qf = math.inf if q == math.inf else float(q)
    if n < 2:
        raise DomainError("abbicco_rate is stated for n >= 2")
    if n == 2:
        ok = 2.0 - _BAND <= qf <= q_sharp(2) + _BAND
    elif n == 3:
        ok = 1.0 < qf <= 4.0 + _BAND
    else:
        ok = 2.0 * (n - 1.0) / (n + 1.0) - _BAND <= qf <= q_sharp(n) + _BAND
    if not ok:
        raise DomainError(f"q = {q} outside the admissible range for n = {n}")
    iq = _inv_q(q)
    thresh = n + 1.0 - 2.0 * iq
    mu_f, iq_f = _maybe_frac(mu), _inv_q_frac(q)
    thresh_f = (n + 1 - 2 * iq_f) if iq_f is not None else None
    sgn = _sign(muf, thresh, mu_f, thresh_f)
    if sgn > 0:
        return RatePrediction(-n * (1.0 - iq), 1.0, 0.0, "Abbicco-a")
    return RatePrediction(eps - (n - 1.0) * (0.5 - iq) - 0.5 * muf,
                          0.5 * muf - eps, 0.0, "Abbicco-b")
