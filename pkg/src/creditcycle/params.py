"""Model parameters, rate identities and the characteristic quadratic."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

PARAM_KEYS = ("r", "delta", "a", "sigma", "F", "s0")


class ParameterError(ValueError):
    """Raised for missing, non-finite or out-of-domain model parameters."""

    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message)
        self.field_name = field_name


class DegenerateEquationError(ParameterError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Rates are per annum, sigma per sqrt(annum), F and s0 in trillions.

    ``mu`` and ``lam`` are derived from the stored fields and cannot be set.
    ``a`` may be zero or negative (a contracting issuance policy).
    ``sigma`` may be zero: the deterministic issuance limit is valid for
    simulation, but the characteristic equation and the risk price are then
    undefined and their functions raise.
    """

    r: float
    delta: float
    a: float
    sigma: float
    F: float
    s0: float

    def __post_init__(self):
        for name in PARAM_KEYS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f"{name} must be a number, got {value!r}", name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}", name)
            object.__setattr__(self, name, float(value))
        for name in ("r", "delta", "F", "s0"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)!r}", name)
        if self.sigma < 0.0:
            raise ParameterError(f"sigma must be non-negative, got {self.sigma!r}", "sigma")

    @property
    def mu(self) -> float:
        """Risk-adjusted rate: current yield plus expected issuance growth."""
        return self.delta + self.a

    @property
    def lam(self) -> float:
        return implied_risk_price(self)

    @property
    def log_drift(self) -> float:
        return self.a - 0.5 * self.sigma**2

    def replace(self, **changes) -> "ModelParams":
        values = asdict(self)
        values.update(changes)
        return ModelParams(**values)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


# Numerical primer: F = 200 tr, liquidity 9.6 tr, r = 5%, delta = 4.5%, a = 2.5%, sigma = 15%.
PRIMER = ModelParams(r=0.05, delta=0.045, a=0.025, sigma=0.15, F=200.0, s0=9.6)

# Values printed alongside the primer parameters; compared, never used.
PRIMER_STATED = {"mu": 0.07, "lambda": 0.45, "beta_minus": -0.099, "beta_plus": 2.404}


def params_from_mapping(data) -> ModelParams:
    if not isinstance(data, dict) or not data:
        raise ParameterError("parameter file is empty or not a flat mapping")
    unknown = sorted(set(data) - set(PARAM_KEYS))
    if unknown:
        raise ParameterError(f"unknown parameter key(s): {', '.join(unknown)}", unknown[0])
    missing = [k for k in PARAM_KEYS if k not in data]
    if missing:
        raise ParameterError(f"missing parameter key(s): {', '.join(missing)}", missing[0])
    return ModelParams(**{k: data[k] for k in PARAM_KEYS})


def load_params(path: str | Path) -> ModelParams:
    """Read a flat JSON object with exactly the keys r, delta, a, sigma, F, s0."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise ParameterError(f"parameter file {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"cannot parse {path}: {exc}") from exc
    return params_from_mapping(data)


def is_primer(params: ModelParams, rel: float = 1e-12) -> bool:
    return all(
        math.isclose(getattr(params, k), getattr(PRIMER, k), rel_tol=rel, abs_tol=0.0)
        for k in PARAM_KEYS
    )


@dataclass(frozen=True)
class CharacteristicRoots:
    beta_minus: float
    beta_plus: float

    @property
    def beta(self) -> float:
        """The root that carries economic meaning (the one above one)."""
        return self.beta_plus


def characteristic_polynomial(beta, r: float, delta: float, sigma: float):
    """0.5 sigma^2 beta (beta - 1) + (r - delta) beta - r; works on arrays."""
    return 0.5 * sigma**2 * beta * (beta - 1.0) + (r - delta) * beta - r


def solve_characteristic(r: float, delta: float, sigma: float) -> CharacteristicRoots:
    if not sigma > 0.0:
        raise DegenerateEquationError("sigma must be positive: the quadratic degenerates", "sigma")
    qa = 0.5 * sigma**2
    qb = (r - delta) - qa
    qc = -r
    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0.0:
        raise DegenerateEquationError(f"characteristic discriminant is not positive ({disc!r})")
    # larger-magnitude root first, the other from the product of roots
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    r1 = q / qa
    r2 = qc / q if q != 0.0 else 0.0
    lo, hi = sorted((r1, r2))
    return CharacteristicRoots(beta_minus=lo, beta_plus=hi)


def characteristic_roots(params: ModelParams) -> CharacteristicRoots:
    return solve_characteristic(params.r, params.delta, params.sigma)


def implied_risk_price(params: ModelParams) -> float:
    if params.sigma == 0.0:
        raise ZeroDivisionError("risk price undefined for zero volatility")
    return (params.delta + params.a - params.r) / params.sigma


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    note: str = ""


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"checks": [asdict(c) for c in self.checks], "diagnostics": list(self.diagnostics)}


def validate_params(params: ModelParams, stated: dict | None = None) -> ValidationReport:
    """Check the rate identities and the root conditions.

    Violations are reported, never raised.  ``stated`` maps any of
    ``mu``, ``lambda``, ``beta_minus``, ``beta_plus`` to externally quoted
    values that are compared against the derived ones; for the primer
    parameters the quoted primer values are used when ``stated`` is None.
    """
    from .notes import paper_note

    if stated is None and is_primer(params):
        stated = PRIMER_STATED
    stated = stated or {}
    if not params.sigma > 0.0:
        raise ParameterError("sigma must be positive to validate the rate identities", "sigma")
    report = ValidationReport()
    add = report.checks.append
    tol = 1e-12

    positive = min(params.r, params.delta, params.sigma, params.F, params.s0)
    add(Check("positivity", positive > 0.0, positive, 0.0, 0.0, "min of r, delta, sigma, F, s0"))

    mu = params.mu
    lam = params.lam
    add(Check("mu = delta + a", True, mu - (params.delta + params.a), 0.0, tol))
    res10 = mu - (params.r + lam * params.sigma)
    add(Check("mu = r + lambda*sigma", abs(res10) <= tol, res10, 0.0, tol))
    res11 = (params.r - params.delta) - (params.a - lam * params.sigma)
    add(Check("r - delta = a - lambda*sigma", abs(res11) <= tol, res11, 0.0, tol))

    nu = params.log_drift
    add(Check(
        "log drift a - sigma^2/2 > 0", nu > 0.0, nu, 0.0, 0.0,
        "upward passage is certain" if nu > 0.0 else "upward passage is not certain",
    ))

    roots = characteristic_roots(params)
    for label, beta in (("beta_minus", roots.beta_minus), ("beta_plus", roots.beta_plus)):
        resid = characteristic_polynomial(beta, params.r, params.delta, params.sigma)
        bound = tol * max(1.0, params.r)
        add(Check(f"{label} residual", abs(resid) <= bound, resid, 0.0, bound))
    prod = roots.beta_minus * roots.beta_plus
    add(Check("vieta product", math.isclose(prod, -2 * params.r / params.sigma**2, rel_tol=tol),
              prod, -2 * params.r / params.sigma**2, tol))
    von_mises = roots.beta_plus * (1.0 - params.delta)
    add(Check("vonMises beta*(1-delta) > 1", von_mises > 1.0, von_mises, 1.0, 0.0))

    if "mu" in stated:
        res = stated["mu"] - mu
        add(Check("stated mu", abs(res) <= 1e-9, stated["mu"], mu, 1e-9))
        if abs(res) > 1e-9:
            report.diagnostics.append(paper_note("mu", f"stated mu={stated['mu']} but delta + a = {mu:.6g}"))
    if "lambda" in stated:
        s_lam = stated["lambda"]
        res = params.r + s_lam * params.sigma - mu
        add(Check("stated lambda", abs(res) <= 1e-9, s_lam, lam, 1e-9))
        if abs(res) > 1e-9:
            report.diagnostics.append(paper_note(
                "lambda",
                f"stated lambda={s_lam} violates mu = r + lambda*sigma "
                f"(gives mu={params.r + s_lam * params.sigma:.6g}, derived lambda={lam:.6g})",
            ))
    if "beta_minus" in stated:
        s_b = stated["beta_minus"]
        resid = characteristic_polynomial(s_b, params.r, params.delta, params.sigma)
        add(Check("stated beta_minus", abs(s_b - roots.beta_minus) <= 1e-3, s_b, roots.beta_minus, 1e-3))
        if abs(s_b - roots.beta_minus) > 1e-3:
            report.diagnostics.append(paper_note(
                "beta_minus",
                f"stated beta_minus={s_b} leaves quadratic residual {resid:.6g}; "
                f"the quadratic gives {roots.beta_minus:.6g}",
            ))
    if "beta_plus" in stated:
        s_b = stated["beta_plus"]
        add(Check("stated beta_plus", abs(s_b - roots.beta_plus) <= 1e-3, s_b, roots.beta_plus, 1e-3))
        if abs(s_b - roots.beta_plus) > 1e-3:
            report.diagnostics.append(paper_note(
                "beta_plus", f"stated beta_plus={s_b}; the quadratic gives {roots.beta_plus:.6g}"))
    return report
