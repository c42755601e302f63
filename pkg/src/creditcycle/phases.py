"""Minsky phase partition of the issuance axis."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class PhaseName(str, enum.Enum):
    HEDGE = "Hedge"
    SPECULATIVE = "Speculative"
    PONZI = "Ponzi"
    COLLAPSE = "Collapse"


@dataclass(frozen=True)
class Phase:
    name: PhaseName
    post_minsky: bool

    def __str__(self) -> str:
        return self.name.value


def classify_phase(points, s: float) -> Phase:
    """Half-open intervals [0, s_hat), [s_hat, s*), [s*, s~), [s~, inf).

    A boundary value belongs to the phase that starts there.  ``post_minsky``
    is set once s reaches the market-variant Minsky point (when it exists).
    """
    if s < 0.0:
        raise ValueError(f"issuance level must be non-negative, got {s!r}")
    if s < points.s_hat:
        name = PhaseName.HEDGE
    elif s < points.s_star:
        name = PhaseName.SPECULATIVE
    elif s < points.s_tilde:
        name = PhaseName.PONZI
    else:
        name = PhaseName.COLLAPSE
    s_m = points.s_m_market
    post = s >= s_m if s_m is not None else s >= points.s_hat
    return Phase(name, post)
