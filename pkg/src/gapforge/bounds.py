"""The calculable lower-bound pipeline.

The chain goes: squared gate set -> spectral gaps of all removal subsets at
the reference scale t0 -> the aggregate

    g_t0(S) = (1/|S|) * sum_{m=0}^{k-2} min_{j_1..j_m} gap_t0(S^2_{j_1..j_m})^2

-> the closed-form bound at any scale t >= t0:

    gap_t(S) >= alpha(d, eps0) * g_t0(S) * log(beta(d) t)^{-2c}.

The closed form is an algebraic collapse of the per-subset diameter estimates
(the b-coefficients below) at the canonical eps_m = 1/(4 C t); both routes are
evaluated and asserted equal to relative 1e-12 on every call.

Also here: the two epsilon-net length laws derived from a gap.  The covering
law ell <= (d^2-1)/gap * log(1/eps) + B has a negative intercept B and is
therefore vacuous for eps >= 2/9.5; the scale-resolved variant stays positive
and is the one used for empirical comparisons.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

from .avgop import DENSE_CUTOFF, gap_at_scale
from .constants import (
    C_BALL,
    C_CHORD,
    SK_EXPONENT,
    BoundParams,
    scale_t0,
    covering_law_constants,
)
from .errors import DomainError
from .gates import GateSet, squared_set, universality_heuristic
from .weightlat import IrrepMeta

__all__ = [
    "SubsetGapTable",
    "BoundReport",
    "subset_squares",
    "g_t0",
    "main_lower_bound",
    "b_coefficient",
    "gap_bound_from_b",
    "gap_bound_from_diameter",
    "net_length_covering",
    "net_length_scale_bound",
]


@dataclass(frozen=True)
class SubsetGapTable:
    """Minimal subset gaps of the squared set at the reference scale.

    per_m[m] = (min gap over all m-element removals, the minimizing removal).
    """

    t0: int
    per_m: tuple  # ((min_gap, removed_indices), ...) for m = 0 .. k-2
    k: int
    universality: tuple = field(default=())  # ((i, j, verdict), ...)

    def to_json_dict(self) -> dict:
        return {
            "t0": self.t0,
            "k": self.k,
            "per_m": [
                {"m": m, "min_gap": g, "removed": list(sub)}
                for m, (g, sub) in enumerate(self.per_m)
            ],
            "universality": [
                {"pair": [i, j], "verdict": v} for i, j, v in self.universality
            ],
        }


@dataclass(frozen=True)
class BoundReport:
    """The lower bound at scale t together with everything that entered it."""

    params: BoundParams
    g_t0: float
    t: int
    lower_bound: float
    table: SubsetGapTable
    below_reference_scale: bool

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.to_json_dict(),
            "g_t0": self.g_t0,
            "t": self.t,
            "lower_bound": self.lower_bound,
            "subset_gaps": self.table.to_json_dict(),
            "below_reference_scale": self.below_reference_scale,
        }


def subset_squares(gs: GateSet, removed=()) -> GateSet:
    """The squared set S^2 with the listed pair indices removed."""
    k = gs.k
    removed = tuple(removed)
    if len(set(removed)) != len(removed):
        raise DomainError(f"removal indices must be distinct, got {removed!r}")
    if any(not (0 <= i < k) for i in removed):
        raise DomainError(f"removal indices out of range for k={k}: {removed!r}")
    if len(removed) > max(k - 2, 0):
        raise DomainError(
            f"can remove at most k-2 = {k - 2} pairs, got {len(removed)}"
        )
    sq = squared_set(gs)
    pairs = tuple(p for i, p in enumerate(sq.pairs) if i not in removed)
    return GateSet(d=gs.d, pairs=pairs, symmetric=gs.symmetric)


def g_t0(
    gs: GateSet,
    eps0: float | None = None,
    t_override: int | None = None,
    check_universality: bool = True,
    dense_cutoff: int = DENSE_CUTOFF,
    threads: int | None = None,
    progress=None,
) -> tuple:
    """The aggregate squared subset gap entering the main bound.

    Returns (g, SubsetGapTable).  The reference scale is scale_t0(eps0, d)
    unless t_override pins it directly (the t_override path is how the
    expensive reference scales are desk-checked at small t).
    """
    if not gs.symmetric:
        raise DomainError("g_t0 needs a symmetric gate set")
    k = gs.k
    if k < 2:
        raise DomainError(f"g_t0 needs k >= 2 gate pairs, got k={k}")
    if t_override is not None:
        if not isinstance(t_override, int) or t_override < 1:
            raise DomainError(f"t_override must be an integer >= 1, got {t_override!r}")
        t0 = t_override
    else:
        if eps0 is None:
            raise DomainError("g_t0 needs eps0 unless t_override is given")
        t0 = scale_t0(eps0, gs.d)

    sq = squared_set(gs)
    verdicts = []
    if check_universality:
        for i, j in itertools.combinations(range(k), 2):
            sub = GateSet(d=gs.d, pairs=(sq.pairs[i], sq.pairs[j]), symmetric=True)
            v = universality_heuristic(sub)
            if v != "universal-likely":
                warnings.warn(
                    f"squared pair subset ({i}, {j}) looks {v}; the subset gaps "
                    f"and hence g_t0 may degenerate to zero"
                )
            verdicts.append((i, j, v))

    per_m = []
    for m in range(k - 1):
        best_gap, best_sub = None, None
        for combo in itertools.combinations(range(k), m):
            rep = gap_at_scale(
                subset_squares(gs, combo),
                t0,
                dense_cutoff=dense_cutoff,
                threads=threads,
            )
            if progress is not None:
                progress(m, combo, rep.gap)
            if best_gap is None or rep.gap < best_gap:
                best_gap, best_sub = rep.gap, combo
        per_m.append((max(best_gap, 0.0), best_sub))

    for m in range(1, len(per_m)):
        if per_m[m][0] > per_m[m - 1][0] + 1e-10:
            warnings.warn(
                f"subset minimum increased from m={m - 1} to m={m} "
                f"({per_m[m - 1][0]:.6g} -> {per_m[m][0]:.6g}); the removal "
                f"family is not gap-monotone for this set"
            )

    g = sum(gap * gap for gap, _ in per_m) / (2 * k)
    assert 0.0 <= g <= (k - 1) / (2 * k) + 1e-12
    table = SubsetGapTable(t0=t0, per_m=tuple(per_m), k=k, universality=tuple(verdicts))
    return g, table


def main_lower_bound(
    gs: GateSet,
    eps0: float,
    t: int | None = None,
    t_override: int | None = None,
    check_universality: bool = True,
    dense_cutoff: int = DENSE_CUTOFF,
    threads: int | None = None,
) -> BoundReport:
    """gap_t(S) >= alpha * g_t0(S) * log(beta t)^{-2c}, fully evaluated.

    t defaults to the reference scale t0(eps0, d).  Requesting t below t0 is
    an error unless t_override is supplied, in which case the report carries
    below_reference_scale=True: the number is then a diagnostic, not a
    guarantee.
    """
    params = BoundParams.compute(gs.d, eps0)
    if t is None:
        t = params.t0
    if not isinstance(t, int) or t < 1:
        raise DomainError(f"t must be an integer >= 1, got {t!r}")
    below = t < params.t0 or (t_override is not None and t_override < params.t0)
    if t < params.t0 and t_override is None:
        raise DomainError(
            f"t={t} is below the reference scale t0={params.t0}; pass t_override "
            f"to evaluate the diagnostic anyway"
        )
    if below:
        warnings.warn(
            f"evaluating below the reference scale t0={params.t0}; the result "
            f"is a diagnostic, not a guaranteed bound"
        )
    log_arg = params.beta * t
    if log_arg <= math.e:
        raise DomainError(
            f"beta * t = {log_arg:.6g} <= e; the log factor is not meaningful"
        )

    g, table = g_t0(
        gs,
        eps0=eps0,
        t_override=t_override,
        check_universality=check_universality,
        dense_cutoff=dense_cutoff,
        threads=threads,
    )

    log_factor = math.log(log_arg) ** (-2.0 * SK_EXPONENT)
    bound_closed = params.alpha * g * log_factor

    # independent re-derivation through the per-subset diameter constants
    k = gs.k
    d = gs.d
    if params.alpha == 0.0:
        bound_rederived = 0.0  # boundary eps0: the diameter estimate certifies nothing
    else:
        numer = (d * d - 1) * (
            2.0 * math.log(1.0 / eps0) + math.log(4.0 * C_BALL**1.5 * d)
        ) + math.log(32.0)
        eps_m = 1.0 / (4.0 * C_CHORD * t)
        terms = 0.0
        for gap_m, _ in table.per_m:
            if gap_m == 0.0:
                continue  # removal subset with no mixing contributes nothing
            ell_0m = numer / gap_m
            A_m = ell_0m / (2.0 * math.log(1.0 / (params.c_s * eps0))) ** SK_EXPONENT
            diam_cap = A_m * math.log(1.0 / (params.c_s**2 * eps_m)) ** SK_EXPONENT
            terms += ((1.0 - 2.0 * C_CHORD * t * eps_m) / diam_cap) ** 2
        bound_rederived = terms / (8.0 * k)
    assert abs(bound_closed - bound_rederived) <= 1e-12 * max(1.0, abs(bound_closed)), (
        bound_closed,
        bound_rederived,
    )

    return BoundReport(
        params=params,
        g_t0=g,
        t=t,
        lower_bound=bound_closed,
        table=table,
        below_reference_scale=below,
    )


def b_coefficient(meta: IrrepMeta, eps: float, ell: float) -> float:
    """Per-irrep mixing coefficient (sqrt(2 (1 - i/d)) - C ||lambda||_1 eps) / ell."""
    if meta.one_norm <= 0:
        raise DomainError("b_coefficient needs a nontrivial weight")
    top = math.sqrt(2.0 * (1.0 - meta.fs_indicator / meta.dim))
    cap = top / (C_CHORD * meta.one_norm)
    if not (0.0 < eps < 1.0 and eps <= cap):
        raise DomainError(
            f"eps must satisfy 0 < eps <= {cap:.6g} (and < 1), got {eps}"
        )
    if ell <= 0:
        raise DomainError(f"ell must be positive, got {ell}")
    return (top - C_CHORD * meta.one_norm * eps) / ell


def gap_bound_from_b(b_list, k: int) -> tuple:
    """(strong, weak) gap bounds from the k-1 subset coefficients.

    strong = (1/8k) sum_m b_m^2,  weak = ((k-1)/8k) b_{k-2}^2; the list is
    ordered by m, and since b_m is nonincreasing in m, strong >= weak.
    """
    if k < 2:
        raise DomainError(f"need k >= 2, got {k}")
    b_list = [float(b) for b in b_list]
    if len(b_list) != k - 1:
        raise DomainError(f"need k-1 = {k - 1} coefficients, got {len(b_list)}")
    if any(b < 0 for b in b_list):
        raise DomainError("b coefficients must be nonnegative")
    strong = sum(b * b for b in b_list) / (8.0 * k)
    weak = (k - 1) * b_list[-1] ** 2 / (8.0 * k)
    return strong, weak


def gap_bound_from_diameter(d: int, t: int, k: int, per_m) -> float:
    """Simplified bound (1/8k) sum_m (1 - 2 C t eps_m)^2 / diam_m^2.

    per_m: (eps_m, diam_m) for m = 0..k-2, with 0 < eps_m <= 1/(2 C t).
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    per_m = list(per_m)
    if len(per_m) != k - 1:
        raise DomainError(f"need k-1 = {k - 1} entries, got {len(per_m)}")
    cap = 1.0 / (2.0 * C_CHORD * t)
    total = 0.0
    for eps_m, diam_m in per_m:
        if not (0.0 < eps_m <= cap and eps_m < 1.0):
            raise DomainError(f"eps_m must be in (0, {cap:.6g}], got {eps_m}")
        if diam_m <= 0:
            raise DomainError(f"diameters must be positive, got {diam_m}")
        total += (1.0 - 2.0 * C_CHORD * t * eps_m) ** 2 / diam_m**2
    return total / (8.0 * k)


def net_length_covering(d: int, gap: float, eps: float) -> float:
    """Net-length law from the covering argument: (d^2-1)/gap * log(1/eps) + B.

    B < 0 always; for eps >= 2/9.5 the value is nonpositive and the law is
    vacuous (it certifies nothing).  Callers comparing against empirical nets
    should prefer net_length_scale_bound in that regime.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    slope, intercept, _ = covering_law_constants(d, gap)
    return slope * math.log(1.0 / eps) + intercept


def net_length_scale_bound(d: int, gap_t: float, eps: float) -> tuple:
    """Scale-resolved net length: (ell, required scale t).

    ell = [(d^2-1)(2 log(1/eps) + log(4 C_b^{3/2} d)) + log 32] / gap_t is a
    valid length once the gap is certified at the returned scale.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if not 0.0 < gap_t <= 1.0:
        raise DomainError(f"gap_t must be in (0, 1], got {gap_t}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    numer = (d * d - 1) * (
        2.0 * math.log(1.0 / eps) + math.log(4.0 * C_BALL**1.5 * d)
    ) + math.log(32.0)
    return numer / gap_t, scale_t0(eps, d)
