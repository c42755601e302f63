"""Discrepancy diagnostics against the published primer.

Every diagnostic starts with ``PAPER-NOTE:`` and carries the location of the
printed value it is compared with.
"""

PREFIX = "PAPER-NOTE:"

LOCATIONS = {
    "mu": "Numerical primer, risk-adjusted rate 0.07",
    "lambda": "Numerical primer, price of risk 0.45",
    "beta_minus": "Numerical primer, negative root -0.099",
    "beta_plus": "Numerical primer, positive root 2.404",
    "s_star": "Numerical primer, s* = 2.4/1.4 x 0.045 x 200 = 15.5",
    "f_star": "Numerical primer, f(s*) printed as 142.9 and as 142.3",
    "s_tilde": "Primer cycle summary, collapse row s~ = 28.9, B = f = 642.6",
    "row_12_4": "Primer default-probability summary, row s = 12.4, p = 0.315",
    "product_inequality": "Natural-cycle argument, D(s^)B(s*) < F^2",
    "no_herding_default": "Distance to default at s* without herding vs the tabulated p(s*) = 0.417",
    "zero_money": "Calendar-time view, zero-money condition <M(t*)> = P(s*) = 0",
}


def paper_note(key: str, message: str) -> str:
    return f"{PREFIX} [{LOCATIONS[key]}] {message}"
