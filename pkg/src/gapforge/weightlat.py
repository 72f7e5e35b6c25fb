"""Highest-weight bookkeeping for PU(d) irreducibles at finite scale.

The irreps that enter the t-fold tensor power (U (x) Ubar)^{(x)t} are labelled
by nonincreasing integer vectors lambda of length d with sum(lambda) = 0 whose
positive part has total size at most t.  This module enumerates those labels
and computes the per-irrep metadata (dimension, 1-norm, Frobenius-Schur
indicator) that the averaging-operator machinery consumes.

Weights are kept in the canonical sum-zero normalization, which is the unique
representative of minimal 1-norm among constant integer shifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import DomainError

__all__ = [
    "Weight",
    "IrrepMeta",
    "enumerate_weights",
    "enumerate_nontrivial_weights",
    "weight_one_norm",
    "weyl_dimension",
    "frobenius_schur",
    "irrep_meta",
]


@dataclass(frozen=True, order=True)
class Weight:
    """A dominant PU(d) weight in sum-zero normalization.

    entries: nonincreasing integers summing to zero.  Hashable, so Weight
    doubles as a dict key for per-irrep tables.
    """

    entries: tuple[int, ...]

    def __post_init__(self):
        e = self.entries
        if len(e) < 2:
            raise DomainError(f"weight needs at least 2 entries, got {e!r}")
        if not all(isinstance(x, int) for x in e):
            raise DomainError(f"weight entries must be integers, got {e!r}")
        if any(e[i] < e[i + 1] for i in range(len(e) - 1)):
            raise DomainError(f"weight entries must be nonincreasing, got {e!r}")
        if sum(e) != 0:
            raise DomainError(f"weight entries must sum to zero, got {e!r}")

    @classmethod
    def from_signature(cls, sig) -> "Weight":
        """Build from any nonincreasing integer signature by shifting to sum zero.

        The shift must be integral, i.e. sum(sig) divisible by len(sig);
        otherwise the signature does not descend to PU(d).
        """
        sig = tuple(int(x) for x in sig)
        d = len(sig)
        s = sum(sig)
        if d == 0 or s % d != 0:
            raise DomainError(f"signature {sig!r} has no integral sum-zero shift")
        c = s // d
        return cls(tuple(x - c for x in sig))

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def one_norm(self) -> int:
        return sum(abs(x) for x in self.entries)

    @property
    def positive_size(self) -> int:
        # |lambda_+|: total size of the positive part, the scale at which
        # this irrep first appears.
        return sum(x for x in self.entries if x > 0)

    def conjugate(self) -> "Weight":
        return Weight(tuple(-x for x in reversed(self.entries)))

    def is_trivial(self) -> bool:
        return all(x == 0 for x in self.entries)


@dataclass(frozen=True)
class IrrepMeta:
    """Static data of one irrep: dimension, self-duality, weight 1-norm."""

    weight: Weight
    dim: int
    fs_indicator: int  # 1 self-conjugate (real), 0 complex; quaternionic absent
    one_norm: int


def _partitions(s: int, max_parts: int, max_first: int | None = None) -> Iterator[tuple[int, ...]]:
    """Nonincreasing positive tuples summing to s with at most max_parts parts."""
    if s == 0:
        yield ()
        return
    if max_parts <= 0:
        return
    first_cap = s if max_first is None else min(s, max_first)
    for f in range(first_cap, 0, -1):
        for rest in _partitions(s - f, max_parts - 1, f):
            yield (f,) + rest


def enumerate_weights(d: int, t: int) -> list[Weight]:
    """All dominant sum-zero weights of PU(d) appearing up to scale t.

    A weight lambda appears iff |lambda_+| <= t.  Every such lambda splits
    uniquely into a positive partition mu and a negative partition nu with
    |mu| = |nu| = s <= t and #parts(mu) + #parts(nu) <= d, so we enumerate
    partition pairs.  Output is sorted lexicographically descending, trivial
    weight last.
    """
    if not isinstance(d, int) or d < 2:
        raise DomainError(f"d must be an integer >= 2, got {d!r}")
    if not isinstance(t, int) or t < 0:
        raise DomainError(f"t must be an integer >= 0, got {t!r}")
    out = []
    for s in range(t + 1):
        for mu in _partitions(s, d):
            room = d - len(mu)
            for nu in _partitions(s, room):
                pad = d - len(mu) - len(nu)
                entries = mu + (0,) * pad + tuple(-x for x in reversed(nu))
                out.append(Weight(entries))
    out.sort(key=lambda w: w.entries, reverse=True)
    assert len(set(out)) == len(out)  # partition-pair decomposition is unique
    return out


def enumerate_nontrivial_weights(d: int, t: int) -> list[Weight]:
    return [w for w in enumerate_weights(d, t) if not w.is_trivial()]


def weight_one_norm(weight: Weight) -> int:
    return weight.one_norm


def weyl_dimension(weight: Weight, d: int | None = None) -> int:
    """dim of the irrep with highest weight lambda, by the Weyl formula.

    prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i), exact in integer
    arithmetic.
    """
    lam = weight.entries
    if d is not None and d != len(lam):
        raise DomainError(f"weight {lam!r} has d={len(lam)}, expected {d}")
    n = len(lam)
    num = 1
    den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    q, r = divmod(num, den)
    assert r == 0
    return q


def frobenius_schur(weight: Weight) -> int:
    """Frobenius-Schur indicator: 1 iff self-conjugate, else 0.

    PU(d) irreps of the tensor powers treated here are never quaternionic,
    so the indicator is {0, 1}-valued.
    """
    return 1 if weight == weight.conjugate() else 0


def irrep_meta(weight: Weight) -> IrrepMeta:
    return IrrepMeta(
        weight=weight,
        dim=weyl_dimension(weight),
        fs_indicator=frobenius_schur(weight),
        one_norm=weight.one_norm,
    )


def max_dimension(d: int, t: int) -> int:
    """Largest irrep dimension occurring up to scale t (resource planning)."""
    dims = [weyl_dimension(w) for w in enumerate_weights(d, t)]
    return max(dims) if dims else 0


# scale sanity shared by the operator modules
def check_scale(t) -> int:
    if not isinstance(t, int) or t < 1:
        raise DomainError(f"scale t must be an integer >= 1, got {t!r}")
    return t
