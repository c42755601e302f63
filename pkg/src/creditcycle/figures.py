"""Plot-ready (x, y...) series for the analytic figures."""
from __future__ import annotations

import math

import numpy as np

from .cycle import cycle_points
from .herding import PRIMER_HERDING, HerdingParams, herding_new_debt
from .params import ModelParams, characteristic_polynomial
from .valuation import maturity_payoffs, valuation_snapshot

FIGURES = ("fig3", "fig4", "fig5", "fig7", "fig9", "fig10", "fig11", "fig12")


def _payoff_series(params: ModelParams, n: int):
    b = np.linspace(0.0, 2.0 * params.F, n)
    pay = [maturity_payoffs(params.F, float(x)) for x in b]
    return b, pay


def herding_series(params: ModelParams, mode: str = "full", n: int = 400, gamma: float | None = None):
    """(s, f without herding, f with herding) on [0, s*) approaching the singularity."""
    if mode == "paper":
        K, beta, s_star = PRIMER_HERDING["K"], PRIMER_HERDING["beta"], PRIMER_HERDING["s_star"]
        gamma = PRIMER_HERDING["gamma"] if gamma is None else gamma
    else:
        pts = cycle_points(params, "full")
        K, beta, s_star = pts.K, pts.beta, pts.s_star
        gamma = PRIMER_HERDING["gamma"] if gamma is None else gamma
    h0 = HerdingParams(0, s_star, gamma)
    h1 = HerdingParams(1, s_star, gamma)
    # geometric approach to s*, gaps from s*/2 down to 1e-3
    gaps = np.geomspace(0.5 * s_star, 1e-3, n // 2)
    s = np.unique(np.concatenate([np.linspace(0.0, 0.5 * s_star, n - n // 2, endpoint=False), s_star - gaps]))
    rows = [(float(x), herding_new_debt(K, beta, h0, float(x)), herding_new_debt(K, beta, h1, float(x)))
            for x in s]
    return ("s", "f_h0", "f_h1"), rows


def emit_figure_series(which: str, params: ModelParams, mode: str = "full", n: int = 401):
    """Return (header, rows) for one figure analogue."""
    if which in ("fig3", "fig4", "fig5"):
        b, pay = _payoff_series(params, n)
        if which == "fig3":
            return ("B", "call_payoff"), [(float(x), c) for x, (c, _) in zip(b, pay)]
        if which == "fig4":
            return ("B", "market_debt"), [(float(x), params.F - p) for x, (_, p) in zip(b, pay)]
        return ("B", "put_payoff"), [(float(x), p) for x, (_, p) in zip(b, pay)]

    pts = cycle_points(params, mode)
    if which == "fig7":
        # herding values assets at expected debt, leaving A - B = P as equity
        s = np.linspace(0.0, pts.s_star, n)[1:]
        rows = []
        for x in s:
            snap = valuation_snapshot(params, pts, float(x))
            eq_h = snap.A - snap.B
            lev_h = snap.A / eq_h if eq_h > 0 else math.inf
            rows.append((float(x), snap.A / snap.E, lev_h))
        return ("s", "leverage", "leverage_herding"), rows
    if which == "fig9":
        beta = np.linspace(-3.0, 4.0, n)
        y = characteristic_polynomial(beta, params.r, params.delta, params.sigma)
        return ("beta", "polynomial"), [(float(a), float(b)) for a, b in zip(beta, y)]
    if which == "fig10":
        s = np.linspace(0.0, 1.1 * pts.s_tilde, n)
        rows = []
        for x in s:
            snap = valuation_snapshot(params, pts, float(x))
            rows.append((snap.s, snap.B, snap.f, snap.D, snap.P, str(snap.phase)))
        return ("s", "B", "f", "D", "P", "phase"), rows
    if which == "fig11":
        return herding_series(params, mode, n)
    if which == "fig12":
        header, bubble = herding_series(params, mode, n)
        rows = [(x, f1, valuation_snapshot(params, pts, x).D) for x, _, f1 in bubble]
        tail = np.linspace(pts.s_star, pts.s_tilde, n // 2)
        rows += [(float(x), math.nan, valuation_snapshot(params, pts, float(x)).D) for x in tail]
        return ("s", "f_herding", "D"), rows
    raise ValueError(f"unknown figure {which!r}; expected one of {FIGURES}")
