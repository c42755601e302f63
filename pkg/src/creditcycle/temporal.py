"""Expected money, debt and assets in calendar time."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .notes import paper_note
from .params import ModelParams
from .valuation import valuation_snapshot


def _growth_integral(a: float, t):
    """integral_0^t exp(a u) du, continuous through a = 0."""
    t = np.asarray(t, dtype=float)
    if a == 0.0:
        return t
    return np.expm1(a * t) / a


def expected_money_aggregate(params: ModelParams, t):
    """Cumulative expected issuance (s0/a)(exp(a t) - 1); s0 t when a = 0."""
    return params.s0 * _growth_integral(params.a, t)


def expected_debt_time(params: ModelParams, t):
    return params.s0 * np.exp(params.a * np.asarray(t, dtype=float)) / params.delta


@dataclass(frozen=True)
class TemporalSnapshot:
    t: float
    M: float
    B: float
    A: float


def expected_assets_time(params: ModelParams, t: float) -> TemporalSnapshot:
    # sum form stays finite at a = 0; equals (s0/a)((mu/delta) e^{at} - 1)
    M = float(expected_money_aggregate(params, t))
    B = float(expected_debt_time(params, t))
    return TemporalSnapshot(float(t), M, B, M + B)


def temporal_series(params: ModelParams, t_values) -> np.ndarray:
    t = np.asarray(t_values, dtype=float)
    M = expected_money_aggregate(params, t)
    B = expected_debt_time(params, t)
    return np.column_stack([t, M, B, M + B])


@dataclass
class ZeroMoneyReport:
    t_star: float
    s0: float
    expected_assets: float
    expected_debt_at_star: float
    expected_money: float
    put_at_star: float
    note: str

    def to_dict(self) -> dict:
        return asdict(self)


def zero_money_singularity_report(params: ModelParams, points) -> ZeroMoneyReport:
    """Crisis clock: t* = 0 with issuance restarted at s*.

    Expected assets reduce to expected debt at s*, and the expected money
    aggregate and the put at s* are both zero.  This is the formal
    singularity, not a literal empty money stock.
    """
    crisis = params.replace(s0=points.s_star)
    snap = expected_assets_time(crisis, 0.0)
    put = valuation_snapshot(params, points, points.s_star).P
    return ZeroMoneyReport(
        t_star=0.0,
        s0=points.s_star,
        expected_assets=snap.A,
        expected_debt_at_star=points.s_star / params.delta,
        expected_money=snap.M,
        put_at_star=put,
        note=paper_note("zero_money",
                        "expected money aggregate and put value vanish together at the crisis time; "
                        "reported as a singularity of the system, not resolved"),
    )
