"""Generalized Routh-Hurwitz test for monic quartics with complex coefficients.

The table is built row by row from the recurrences below. A quartic is
Hurwitz stable (every root in the open left half plane) exactly when the four
first-column pivots ``a1_1, a2_2, a3_3, a4_4`` are strictly positive.

Each row uses only cells of earlier rows. Nothing is simplified algebraically,
so the recurrences can be audited cell by cell.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import Optional

from .polynomial import ComplexQuartic


@dataclass(frozen=True)
class RHTable:
    # row 1
    a1_1: float
    b2_1: float
    a3_1: float
    b4_1: float
    b1_1: float
    a2_1: float
    b3_1: float
    a4_1: float
    # row 2
    a2_2: float
    b3_2: float
    a4_2: float
    b2_2: float
    a3_2: float
    b4_2: float
    # row 3
    a3_3: float
    b4_3: float
    b3_3: float
    a4_3: float
    # row 4
    a4_4: float

    @property
    def pivots(self) -> tuple[float, float, float, float]:
        return (self.a1_1, self.a2_2, self.a3_3, self.a4_4)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    pivots: tuple[float, float, float, float]
    margin: float
    failing_index: Optional[int] = None  # 0-based index of first non-positive pivot


def build_table(q: ComplexQuartic) -> RHTable:
    """Evaluate every cell of the quartic's generalized Routh-Hurwitz table.

    Raises ``OverflowError`` if any cell leaves the floating-point range.
    """
    a1, a2, a3, a4 = q.a
    b1, b2, b3, b4 = q.b

    a1_1, b2_1, a3_1, b4_1 = a1, b2, a3, b4
    b1_1 = a1 * b1 - b2
    a2_1 = a1 * a2 - a3
    b3_1 = a1 * b3 - b4
    a4_1 = a1 * a4

    a2_2 = a1 * a2_1 + b1_1 * b2
    b3_2 = a1 * b3_1 - b1_1 * a3
    a4_2 = a1 * a4_1 + b1_1 * b4
    b2_2 = a2_2 * b2 - a1 * b3_2
    a3_2 = a2_2 * a3 - a1 * a4_2
    b4_2 = a2_2 * b4

    a3_3 = a2_2 * a3_2 + b2_2 * b3_2
    b4_3 = a2_2 * b4_2 - b2_2 * a4_2
    b3_3 = a3_3 * b3_2 - a2_2 * b4_3
    a4_3 = a3_3 * a4_2

    a4_4 = a3_3 * a4_3 + b3_3 * b4_3

    table = RHTable(a1_1, b2_1, a3_1, b4_1, b1_1, a2_1, b3_1, a4_1,
                    a2_2, b3_2, a4_2, b2_2, a3_2, b4_2,
                    a3_3, b4_3, b3_3, a4_3,
                    a4_4)
    if not all(math.isfinite(x) for x in astuple(table)):
        raise OverflowError(f"Routh-Hurwitz table overflowed for {q}")
    return table


def verdict_from_table(table: RHTable) -> StabilityVerdict:
    pivots = table.pivots
    failing = next((i for i, p in enumerate(pivots) if not p > 0), None)
    return StabilityVerdict(stable=failing is None, pivots=pivots,
                            margin=min(pivots), failing_index=failing)


def is_stable(q: ComplexQuartic) -> StabilityVerdict:
    """Hurwitz verdict for ``q``: stable iff all four pivots are > 0.

    A zero pivot counts as not stable; it signals a root on the imaginary axis.
    """
    return verdict_from_table(build_table(q))


@dataclass(frozen=True)
class PropositionConditions:
    upsilon: float
    alpha: float
    beta: float
    gamma: float
    cond3: float

    @property
    def signs(self) -> tuple[bool, bool, bool]:
        return (self.upsilon > 0, self.gamma > 0, self.cond3 > 0)

    @property
    def stable(self) -> bool:
        return all(self.signs)


def proposition_conditions(q: ComplexQuartic, epsilon: float, *, tau_u: float, tau_v: float,
                           f_u: float, g_v: float, D_u: float, D_v: float,
                           lambda_re: float, lambda_im: float) -> PropositionConditions:
    """Closed-form stability conditions in their published form, kept verbatim.

    Diagnostic only: these expressions are known to disagree with the table
    (see :func:`compare_with_table`) and never decide a verdict.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    a1, _, a3, a4 = q.a
    _, b2, b3, b4 = q.b
    upsilon = (epsilon * (tau_u + tau_v)
               * (tau_u + tau_v - g_v * tau_u**2 - f_u * tau_v**2
                  - tau_u**2 * D_v * lambda_re - tau_v**2 * D_u * lambda_re)
               - lambda_im * (D_u + D_v) ** 2)
    alpha = epsilon**2 * upsilon
    beta = a1 * (a1 * b3 - b4) + a3 * b2
    gamma = alpha * (a3 * alpha - a1**3 * a4 + a1 * b2 * b4) + (alpha * b2 - a1 * beta) * beta
    cond3 = ((gamma * beta - alpha)
             * (alpha**2 * b4 - (a1**2 * b4 - b2 * b4) * (alpha * b2 - a1 * beta))
             + (a1**2 * a4 - b2 * b4) * gamma**2)
    return PropositionConditions(upsilon, alpha, beta, gamma, cond3)


def compare_with_table(conds: PropositionConditions, table: RHTable) -> dict:
    """Discrepancy record between the closed forms and the table pivots.

    Compares pivot signs (``a2_2`` vs upsilon, ``a3_3`` vs gamma, ``a4_4`` vs
    cond3), the claimed identity ``a2_2 == epsilon^2 * upsilon`` and the
    overall verdicts.
    """
    verdict = verdict_from_table(table)
    pairs = {
        "upsilon_vs_a2_2": (conds.upsilon, table.a2_2),
        "gamma_vs_a3_3": (conds.gamma, table.a3_3),
        "cond3_vs_a4_4": (conds.cond3, table.a4_4),
    }
    sign_mismatch = [name for name, (closed, pivot) in pairs.items()
                     if (closed > 0) != (pivot > 0)]
    identity_gap = conds.alpha - table.a2_2
    rel_gap = abs(identity_gap) / max(abs(table.a2_2), 1e-300)
    return {
        "sign_mismatches": sign_mismatch,
        "alpha_minus_a2_2": identity_gap,
        "alpha_identity_relative_gap": rel_gap,
        "verdict_table": verdict.stable,
        "verdict_closed_form": conds.stable,
        "verdict_mismatch": verdict.stable != conds.stable,
        "values": {name: {"closed_form": c, "pivot": p} for name, (c, p) in pairs.items()},
    }
