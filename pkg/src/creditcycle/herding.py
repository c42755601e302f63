"""Herding-modified new-debt function with a power-law singularity at s*."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ModelParams
from .valuation import leverage, valuation_snapshot

GAMMA_DEFAULT = 2.39
# Finite stand-in for the divergent term once s sits within 1e-12 s* of s*.
SINGULAR_CAP = 1e300
_NEAR = 1e-12

# Rounded instance used for figure output: 0.2 s^2.4 + h (15.43 - s)^-2.39
PRIMER_HERDING = {"K": 0.2, "beta": 2.4, "s_star": 15.43, "gamma": 2.39}


class SingularityDomainError(ValueError):
    pass


@dataclass(frozen=True)
class HerdingParams:
    h: int
    s_star: float
    gamma: float = GAMMA_DEFAULT

    def __post_init__(self):
        if self.h not in (0, 1):
            raise ValueError(f"herding indicator must be 0 or 1, got {self.h!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")


def singular_term(herding: HerdingParams, s: float) -> float:
    """(s* - s)^-gamma, switched by h."""
    if herding.h == 0:
        return 0.0
    gap = herding.s_star - s
    if gap <= 0.0:
        raise SingularityDomainError(f"s={s!r} is at or beyond the singular point {herding.s_star!r}")
    if gap < _NEAR * herding.s_star:
        log_val = -herding.gamma * math.log(gap)
        return SINGULAR_CAP if log_val >= math.log(SINGULAR_CAP) else math.exp(log_val)
    return gap ** -herding.gamma


def herding_new_debt(K: float, beta: float, herding: HerdingParams, s: float) -> float:
    if s < 0:
        raise ValueError("issuance level must be non-negative")
    return K * s**beta + singular_term(herding, s)


def singular_term_derivative(herding: HerdingParams, s: float) -> float:
    if herding.h == 0:
        return 0.0
    gap = herding.s_star - s
    if gap <= 0.0:
        raise SingularityDomainError(f"s={s!r} is at or beyond the singular point {herding.s_star!r}")
    return herding.gamma * gap ** (-herding.gamma - 1.0)


def singular_derivative_check(herding: HerdingParams, s: float) -> float:
    """Derivative of the singular term divided by (s* - s)^(-gamma-1); equals gamma."""
    if herding.h != 1:
        raise ValueError("the derivative check needs h = 1")
    gap = herding.s_star - s
    if gap <= 0.0:
        raise SingularityDomainError(f"s={s!r} is at or beyond the singular point {herding.s_star!r}")
    return singular_term_derivative(herding, s) / gap ** (-herding.gamma - 1.0)


@dataclass(frozen=True)
class RegimeQuantities:
    equity: float
    leverage: float
    default_probability: float


def herding_regime_quantities(params: ModelParams, points, s: float, herding: bool = True,
                              rel_tol: float = 1e-12) -> RegimeQuantities:
    """Equity, leverage and default probability at s <= s*.

    Under herding the assets at s* are valued at the expected debt, which
    wipes out equity: leverage is infinite and default is certain.  Otherwise
    equity is A - D and default is D / A, which at s* equals (beta-1)/beta.
    """
    if s > points.s_star * (1.0 + rel_tol):
        raise ValueError(f"s={s!r} lies beyond the critical point {points.s_star!r}")
    snap = valuation_snapshot(params, points, min(s, points.s_star))
    if herding and math.isclose(s, points.s_star, rel_tol=rel_tol):
        A = snap.B
        E = A - snap.B
        return RegimeQuantities(E, math.inf, snap.B / A)
    E = snap.A - snap.D
    lev = leverage(snap) if E > 0 else math.inf
    return RegimeQuantities(E, lev, snap.D / snap.A)
