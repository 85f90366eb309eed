"""Model parameters and the derived symbols used throughout the lab.

The wave model under study is

    u_tt - (1+t)^(-2*ell) * Lap u + (beta/(1+t)) u_t = f(u),   f(u) = |u|^p,

with spatial dimension ``n``, speed-decay exponent ``ell`` in [0, 1) and
damping coefficient ``beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """Tuple (n, ell, beta, p) defining one model instance.

    n     -- spatial dimension (>= 1)
    ell   -- speed decay exponent, 0 <= ell < 1
    beta  -- damping coefficient (rate formulas need beta > 1)
    p     -- nonlinearity power, p > 1
    """

    n: int
    ell: float
    beta: float
    p: float = 2.0

    def __post_init__(self) -> None:
        if self.n < 1 or int(self.n) != self.n:
            raise DomainError(f"dimension n must be a positive integer, got {self.n}")
        if not (0.0 <= self.ell < 1.0):
            raise DomainError(f"ell must lie in [0, 1), got {self.ell}")
        if self.p <= 1.0:
            raise DomainError(f"nonlinearity power p must exceed 1, got {self.p}")

    @property
    def one_minus_ell(self) -> float:
        return 1.0 - self.ell


@dataclass(frozen=True)
class DerivedSymbols:
    """Closed-form quantities attached to (n, ell, beta).

    rho    -- Bessel order (1-beta)/(2(1-ell))
    mu     -- damping coefficient of the constant-speed transformed problem
    alpha  -- intermediate-frequency multiplier exponent, equal to mu/2
    k_bar  -- norm-split threshold alpha - n/2
    p_c    -- Fujita-type exponent 1 + 2/(n(1-ell))
    """

    rho: float
    mu: float
    alpha: float
    k_bar: float
    p_c: float

    @classmethod
    def from_params(cls, n: int, ell: float, beta: float) -> "DerivedSymbols":
        if not (0.0 <= ell < 1.0):
            raise DomainError(f"ell must lie in [0, 1), got {ell}")
        if n < 1:
            raise DomainError(f"dimension n must be >= 1, got {n}")
        one = 1.0 - ell
        rho = (1.0 - beta) / (2.0 * one)
        mu = (beta - ell) / one
        alpha = 0.5 * mu
        return cls(
            rho=rho,
            mu=mu,
            alpha=alpha,
            k_bar=alpha - 0.5 * n,
            p_c=1.0 + 2.0 / (n * one),
        )


def derived(params: ModelParams) -> DerivedSymbols:
    return DerivedSymbols.from_params(params.n, params.ell, params.beta)
