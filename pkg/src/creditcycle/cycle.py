"""Critical points of the credit cycle, default probabilities and balance sheets."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize

from .notes import paper_note
from .params import CharacteristicRoots, ModelParams, ParameterError, characteristic_roots, is_primer

Mode = Literal["full", "paper"]
MODES = ("full", "paper")


class NoFreeBoundaryError(ValueError):
    pass


class NoBifurcationError(ValueError):
    pass


# Rounded constants of the published primer, used verbatim in rounded mode.
PRIMER_ROUNDED = {"beta": 2.4, "K": 0.2, "s_star": 15.5, "s_tilde": 28.9}

BISECT_MAXITER = 200


@dataclass(frozen=True)
class CyclePoints:
    s_hat: float
    s_m_market: float | None
    s_m_expected: float | None
    s_star: float
    s_tilde: float
    K: float
    beta: float
    mode: str = "full"

    def to_dict(self) -> dict:
        return asdict(self)


def equilibrium_point(params: ModelParams) -> float:
    """Issuance at which expected debt equals par: delta * F."""
    return params.delta * params.F


def critical_point(params: ModelParams, roots: CharacteristicRoots | float) -> tuple[float, float]:
    """Free boundary s* and the option constant K.

    Value matching K s*^b = s*/delta - F and smooth pasting
    K b s*^(b-1) = 1/delta pin both unknowns.
    """
    beta = roots.beta_plus if isinstance(roots, CharacteristicRoots) else float(roots)
    if not beta > 1.0:
        raise NoFreeBoundaryError(f"no free boundary for beta={beta!r} <= 1")
    s_star = beta / (beta - 1.0) * params.delta * params.F
    K = s_star ** (1.0 - beta) / (params.delta * beta)
    return s_star, K


def collapse_point(params: ModelParams, K: float, roots: CharacteristicRoots | float) -> float:
    """Level where market debt is exhausted, s/delta = K s^beta.

    Returns ``math.inf`` when K == 0 (the option is worthless and the
    market debt never vanishes).
    """
    beta = roots.beta_plus if isinstance(roots, CharacteristicRoots) else float(roots)
    if not beta > 1.0:
        raise NoFreeBoundaryError(f"no collapse point for beta={beta!r} <= 1")
    if K == 0.0:
        return math.inf
    return (K * params.delta) ** (-1.0 / (beta - 1.0))


def bisect_root(fn, lo: float, hi: float, xtol: float, maxiter: int = BISECT_MAXITER) -> float:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoBifurcationError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")
    return optimize.bisect(fn, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=maxiter)


def minsky_point(params: ModelParams, K: float, roots: CharacteristicRoots | float,
                 variant: Literal["market", "expected"] = "market") -> float:
    """Bifurcation level where guarantees equal market (or expected) debt.

    market:   F = 2 (B - f)      (D = P)
    expected: F + f = 2 B        (B = P)
    """
    beta = roots.beta_plus if isinstance(roots, CharacteristicRoots) else float(roots)
    d, F = params.delta, params.F
    if variant == "market":
        def g(s):
            return F - 2.0 * (s / d - K * s**beta)
    elif variant == "expected":
        def g(s):
            return F + K * s**beta - 2.0 * s / d
    else:
        raise ValueError(f"unknown Minsky variant {variant!r}")
    s_hat = equilibrium_point(params)
    return bisect_root(g, 1e-9 * s_hat, s_hat, xtol=1e-12 * s_hat)


def divergence_scale(roots: CharacteristicRoots | float) -> float:
    """Ratio of expected to market debt at s*: beta / (beta - 1)."""
    beta = roots.beta_plus if isinstance(roots, CharacteristicRoots) else float(roots)
    if not beta > 1.0:
        raise NoFreeBoundaryError(f"beta={beta!r} <= 1")
    if math.isinf(beta):
        return 1.0
    return beta / (beta - 1.0)


def _minsky_or_none(params, K, beta, variant):
    try:
        return minsky_point(params, K, beta, variant)
    except NoBifurcationError:
        return None


def cycle_points(params: ModelParams, mode: Mode = "full", roots: CharacteristicRoots | None = None) -> CyclePoints:
    """All critical issuance levels.

    ``mode="paper"`` substitutes the rounded primer constants (beta 2.4,
    K 0.2, s* 15.5, s~ 28.9) and is only defined for the primer parameters.
    """
    s_hat = equilibrium_point(params)
    if mode == "paper":
        if not is_primer(params):
            raise ParameterError("rounded mode is defined only for the primer parameters")
        beta, K = PRIMER_ROUNDED["beta"], PRIMER_ROUNDED["K"]
        s_star, s_tilde = PRIMER_ROUNDED["s_star"], PRIMER_ROUNDED["s_tilde"]
    elif mode == "full":
        roots = roots or characteristic_roots(params)
        beta = roots.beta_plus
        s_star, K = critical_point(params, beta)
        s_tilde = collapse_point(params, K, beta)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return CyclePoints(
        s_hat=s_hat,
        s_m_market=_minsky_or_none(params, K, beta, "market"),
        s_m_expected=_minsky_or_none(params, K, beta, "expected"),
        s_star=s_star,
        s_tilde=s_tilde,
        K=K,
        beta=beta,
        mode=mode,
    )


def free_boundary_oracle(params: ModelParams, beta: float, n: int = 10_000,
                         upper: float | None = None) -> tuple[float, float, float]:
    """Brute-force optimal exercise level.

    For each candidate boundary b on a uniform grid over (s_hat, upper],
    value matching alone fixes K(b) = (b/delta - F) / b^beta; the option
    value K(b) s^beta at every s is largest for the b maximising K(b).
    Returns (argmax, K at argmax, grid step).
    """
    s_hat = equilibrium_point(params)
    upper = 50.0 * s_hat if upper is None else upper
    grid = np.linspace(s_hat, upper, n + 1)[1:]
    k_of_b = (grid / params.delta - params.F) / grid**beta
    i = int(np.argmax(k_of_b))
    return float(grid[i]), float(k_of_b[i]), float(grid[1] - grid[0])


@dataclass(frozen=True)
class DefaultRisk:
    p_hat: float
    p_star: float
    p_tilde: float
    p_geometric: float
    omega: float
    dd_survival: float
    dd_default: float
    herding_default: float
    d_hat: float
    b_star: float
    par: float

    def to_dict(self) -> dict:
        return asdict(self)


def default_risk_from_values(d_hat: float, b_star: float, par: float, beta: float) -> DefaultRisk:
    omega = b_star / d_hat
    return DefaultRisk(
        p_hat=1.0 - d_hat / par,
        p_star=1.0 - par / b_star,
        p_tilde=1.0,
        p_geometric=1.0 - omega**-0.5,
        omega=omega,
        dd_survival=1.0 / beta,
        dd_default=(beta - 1.0) / beta,
        herding_default=1.0,
        d_hat=d_hat,
        b_star=b_star,
        par=par,
    )


def default_probabilities(params: ModelParams, points: CyclePoints) -> DefaultRisk:
    d_hat = params.F - points.K * points.s_hat**points.beta
    b_star = points.beta / (points.beta - 1.0) * params.F
    return default_risk_from_values(d_hat, b_star, params.F, points.beta)


@dataclass
class NaturalCycleReport:
    ordered: bool
    product: float
    par_squared: float
    product_exceeds_par_squared: bool
    consistent: bool
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def natural_cycle_check(risk: DefaultRisk) -> NaturalCycleReport:
    """p_hat < p_star < p_tilde, and the product test that is equivalent to the first inequality.

    p_hat < p_star holds exactly when D(s_hat) * B(s*) > F^2.
    """
    ordered = risk.p_hat < risk.p_star < risk.p_tilde
    product = risk.d_hat * risk.b_star
    sq = risk.par**2
    exceeds = product > sq
    report = NaturalCycleReport(
        ordered=ordered,
        product=product,
        par_squared=sq,
        product_exceeds_par_squared=exceeds,
        consistent=exceeds == (risk.p_hat < risk.p_star),
    )
    if exceeds:
        report.diagnostics.append(paper_note(
            "product_inequality",
            f"D(s_hat)*B(s*) = {product:.6g} > F^2 = {sq:.6g}; the ordering p_hat < p_star "
            "requires '>' whereas '<' is printed",
        ))
    return report


def excess_money(params: ModelParams, roots: CharacteristicRoots | float) -> float:
    beta = roots.beta_plus if isinstance(roots, CharacteristicRoots) else float(roots)
    if not beta > 1.0:
        raise NoFreeBoundaryError(f"beta={beta!r} <= 1")
    return ((1.0 - params.delta) * beta - 1.0) * params.F / (beta - 1.0)


@dataclass
class Ledger:
    point: str
    assets: list[tuple[str, float]]
    liabilities: list[tuple[str, float]]

    @property
    def total_assets(self) -> float:
        return math.fsum(v for _, v in self.assets)

    @property
    def total_liabilities(self) -> float:
        return math.fsum(v for _, v in self.liabilities)

    def balanced(self, rel: float = 1e-9) -> bool:
        return math.isclose(self.total_assets, self.total_liabilities, rel_tol=rel)

    def to_dict(self) -> dict:
        return {"point": self.point, "assets": [list(a) for a in self.assets],
                "liabilities": [list(x) for x in self.liabilities],
                "total_assets": self.total_assets, "total_liabilities": self.total_liabilities}


LEDGERS = ("s_hat", "s_star_relending", "s_star_newdebt", "s_tilde")


def balance_sheet(params: ModelParams, points: CyclePoints, which: str) -> Ledger:
    d, F, beta = params.delta, params.F, points.beta
    scale = beta / (beta - 1.0)
    if which == "s_hat":
        return Ledger(which, [("money", points.s_hat), ("credit", (1.0 - d) * F)],
                      [("riskless debt", F)])
    if which == "s_star_relending":
        return Ledger(which, [("money", points.s_star), ("credit", (1.0 - d) * scale * F)],
                      [("expected debt", scale * F)])
    if which == "s_star_newdebt":
        return Ledger(which, [("money", points.s_star), ("credit", (1.0 - d) * scale * F)],
                      [("riskless debt", F), ("new debt", points.K * points.s_star**beta)])
    if which == "s_tilde":
        s = points.s_tilde
        return Ledger(which, [("money", s), ("credit", (1.0 / d - 1.0) * s)],
                      [("new debt", points.K * s**beta)])
    raise ValueError(f"unknown ledger {which!r}; expected one of {LEDGERS}")


@dataclass(frozen=True)
class TableRow:
    label: str
    s: float | None
    D: float | None
    B: float | None
    f: float | None
    P: float | None
    p: float
    omega: float | None = None


TABLE_FIELDS = ("label", "s", "D", "B", "f", "P", "p", "omega")


def cycle_table(params: ModelParams, mode: Mode = "full") -> list[TableRow]:
    """Rows for s_hat, the debt-growth index row, s* and s~ (the cycle summary)."""
    pts = cycle_points(params, mode)
    F, d, beta = params.F, params.delta, pts.beta
    f_hat = pts.K * pts.s_hat**beta
    d_hat = F - f_hat
    b_star = beta / (beta - 1.0) * F
    b_tilde = pts.s_tilde / d
    risk = default_risk_from_values(d_hat, b_star, F, beta)
    return [
        TableRow("s_hat", pts.s_hat, d_hat, pts.s_hat / d, f_hat, F - d_hat, risk.p_hat),
        TableRow("omega", None, None, None, None, None, risk.p_geometric, risk.omega),
        TableRow("s_star", pts.s_star, F, b_star, b_star - F, 0.0, risk.p_star),
        TableRow("s_tilde", pts.s_tilde, 0.0, b_tilde, b_tilde, 0.0, risk.p_tilde),
    ]


def table_diagnostics(params: ModelParams, mode: Mode = "full") -> list[str]:
    if not is_primer(params):
        return []
    roots = characteristic_roots(params)
    s_star, _ = critical_point(params, roots)
    rows = {r.label: r for r in cycle_table(params, mode)}
    notes = [
        paper_note("s_star", f"the printed arithmetic gives {2.4 / 1.4 * params.delta * params.F:.4f}; "
                             f"full precision gives {s_star:.4f}"),
        paper_note("f_star", "both printed values are roundings of one formula; "
                             f"full precision gives {s_star / params.delta - params.F:.4f}"),
        paper_note("s_tilde", f"B(s~) = f(s~) = {rows['s_tilde'].B:.4f} in {mode} mode"),
        paper_note("row_12_4", "reported as the debt-growth-index row; no formula maps s = 12.4 to it"),
        paper_note("no_herding_default",
                   f"distance-to-default gives default {(roots.beta_plus - 1) / roots.beta_plus:.4f} at s*, "
                   f"the tabulated probability is 1 - F/B(s*) = {rows['s_star'].p:.4f}"),
    ]
    return notes
