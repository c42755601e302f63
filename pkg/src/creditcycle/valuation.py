"""Closed-form debt valuations along the issuance axis and the annuity formulas."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .params import ModelParams, ParameterError
from .phases import Phase, classify_phase


class PostCollapseError(ValueError):
    pass


def expected_debt(params: ModelParams, s):
    """Perpetuity value of the coupon stream, s / delta."""
    if params.delta <= 0.0:
        raise ParameterError("delta must be positive", "delta")
    if np.any(np.asarray(s) < 0):
        raise ValueError("issuance level must be non-negative")
    return s / params.delta


def new_debt_option(K: float, beta: float, s):
    """Value of the option to buy new debt, K s^beta."""
    if K < 0.0 or beta <= 1.0:
        raise ValueError(f"need K >= 0 and beta > 1, got K={K!r}, beta={beta!r}")
    if np.any(np.asarray(s) < 0):
        raise ValueError("issuance level must be non-negative")
    return K * np.power(s, beta) if isinstance(s, np.ndarray) else K * s**beta


def new_debt_derivative(K: float, beta: float, s):
    return K * beta * np.power(s, beta - 1.0)


def new_debt_second_derivative(K: float, beta: float, s):
    return K * beta * (beta - 1.0) * np.power(s, beta - 2.0)


@dataclass(frozen=True)
class ValuationSnapshot:
    s: float
    B: float
    f: float
    D: float
    P: float
    A: float
    E: float
    F_eff: float
    phase: Phase

    def row(self) -> dict:
        d = asdict(self)
        d["phase"] = str(self.phase)
        return d


SNAPSHOT_FIELDS = ("s", "B", "f", "D", "P", "A", "E", "F_eff", "phase")


def effective_par(params: ModelParams, points, s: float, market_debt: float) -> float:
    """Par is intact up to s*, follows the market debt on (s*, s~), is gone from s~ on."""
    if s <= points.s_star:
        return params.F
    if s < points.s_tilde:
        return market_debt
    return 0.0


def valuation_snapshot(params: ModelParams, points, s: float, strict: bool = False) -> ValuationSnapshot:
    if s < 0.0:
        raise ValueError(f"issuance level must be non-negative, got {s!r}")
    if strict and s > points.s_tilde:
        raise PostCollapseError(f"s={s!r} lies beyond the collapse point {points.s_tilde!r}")
    B = s / params.delta
    f = points.K * s**points.beta
    if s >= points.s_tilde:
        D = 0.0
        F_eff = 0.0
    else:
        D = B - f
        F_eff = effective_par(params, points, s, D)
    P = F_eff - D
    A = F_eff + f
    E = f + P
    return ValuationSnapshot(s, B, f, D, P, A, E, F_eff, classify_phase(points, s))


def snapshot_grid(params: ModelParams, points, s_values) -> list[ValuationSnapshot]:
    return [valuation_snapshot(params, points, float(s)) for s in s_values]


def maturity_payoffs(F: float, B_value: float) -> tuple[float, float]:
    """Hockey-stick payoffs at option maturity: (call on new debt, put to default)."""
    put = max(F - B_value, 0.0)
    D = F - put
    call = max(B_value - D, 0.0)
    return call, put


def leverage(snapshot: ValuationSnapshot) -> float:
    """Assets over equity; ``math.inf`` when equity is exhausted."""
    if snapshot.E == 0.0:
        return math.inf
    return snapshot.A / snapshot.E


@dataclass(frozen=True)
class AnnuitySpec:
    m: float
    mu: float
    t_star: float = math.inf

    def __post_init__(self):
        if self.m < 0:
            raise ParameterError("coupon flow must be non-negative", "m")
        if not self.mu > 0:
            raise ParameterError("discount rate must be positive", "mu")
        if not self.t_star > 0:
            raise ParameterError("redemption horizon must be positive", "t_star")


def annuity_value(spec: AnnuitySpec) -> float:
    if math.isinf(spec.t_star):
        return spec.m / spec.mu
    return spec.m / spec.mu * -math.expm1(-spec.mu * spec.t_star)


def deterministic_debt_path(B0: float, m: float | Callable[[float], float], mu: float, t: float) -> float:
    """Debt after t years of compounding at mu net of the coupon flow m(u).

    A constant coupon uses the closed form; a callable one is integrated
    adaptively to 1e-10 absolute tolerance.
    """
    growth = math.exp(mu * t)
    if callable(m):
        paid, _ = integrate.quad(lambda u: m(u) * math.exp(mu * (t - u)), 0.0, t,
                                 epsabs=1e-10, epsrel=1e-12, limit=200)
    elif mu == 0.0:
        paid = m * t
    else:
        paid = m / mu * math.expm1(mu * t)
    return B0 * growth - paid
