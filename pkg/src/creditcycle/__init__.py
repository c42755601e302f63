"""Credit-expansion cycle model: closed-form valuations along the money-issuance
axis, critical points and default probabilities, herding singularity, and
Monte Carlo first passage of the issuance process."""
import warnings

# numba probes an old TBB on import of parallel kernels; the workqueue layer is used instead
warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

from .cycle import (  # noqa: E402
    CyclePoints,
    DefaultRisk,
    Ledger,
    balance_sheet,
    collapse_point,
    critical_point,
    cycle_points,
    cycle_table,
    default_probabilities,
    divergence_scale,
    equilibrium_point,
    excess_money,
    free_boundary_oracle,
    minsky_point,
    natural_cycle_check,
)
from .params import (  # noqa: E402
    PRIMER,
    CharacteristicRoots,
    ModelParams,
    ParameterError,
    characteristic_roots,
    implied_risk_price,
    load_params,
    validate_params,
)
from .phases import Phase, PhaseName, classify_phase  # noqa: E402
from .valuation import (  # noqa: E402
    AnnuitySpec,
    ValuationSnapshot,
    annuity_value,
    deterministic_debt_path,
    expected_debt,
    leverage,
    maturity_payoffs,
    new_debt_option,
    valuation_snapshot,
)

__version__ = "0.1.0"
