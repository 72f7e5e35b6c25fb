"""Gate sets in PU(d): I/O, sampling, distances, and empirical net checks.

A gate set is stored as k labelled special-unitary pairs; when the set is
symmetric the inverses are implied members, so |S| = 2k.  Determinants are
normalized away with the principal d-th root, which is harmless in PU(d).

The metric is the projective unitary distance
    D(g, h) = min_theta max_j 2 |sin((theta - psi_j) / 2)|,
psi_j the eigenphases of g^dagger h.  The inner minimax over the circle is
attained at the midpoint of the minimal covering arc of the eigenphases, so D
is computed exactly from the largest circular gap (plus a short golden-section
polish around the best candidate).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from math import pi, sin

import numpy as np

from .errors import DomainError, GateFileError, ResourceLimitError

__all__ = [
    "GateSet",
    "NetEstimate",
    "make_gateset",
    "load_gateset",
    "save_gateset",
    "haar_random_gateset",
    "pu_distance",
    "squared_set",
    "universality_heuristic",
    "empirical_net",
]

UNITARY_TOL = 1e-10
REPAIR_TOL = 1e-6  # polar-decomposition repair window for file input
DET_SKIP_TOL = 1e-12  # skip det normalization when already special unitary

WORD_CAP = 10_000_000  # default cap on enumerated words in empirical nets
_BATCH = 65536  # word-matrix batch size for distance scans


@dataclass(frozen=True, eq=False)
class GateSet:
    """k labelled gates in SU(d); symmetric sets include implicit inverses."""

    d: int
    pairs: tuple  # ((label, matrix), ...), matrices read-only (d, d) complex
    symmetric: bool = True

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def size(self) -> int:
        # multiset size of S; {U, U^-1} counts two members even when U^2 = 1
        return 2 * self.k if self.symmetric else self.k

    def members(self):
        """(label, matrix) for every member of S, inverses included."""
        out = [(lab, U) for lab, U in self.pairs]
        if self.symmetric:
            out += [(lab + "^-1", U.conj().T) for lab, U in self.pairs]
        return out

    def matrices(self) -> np.ndarray:
        return np.stack([U for _, U in self.members()])

    def labels(self) -> list:
        return [lab for lab, _ in self.pairs]

    def symmetrized(self) -> "GateSet":
        return self if self.symmetric else replace(self, symmetric=True)


def _normalize_gate(U: np.ndarray, d: int, label: str, repair: bool) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (d, d):
        raise GateFileError(f"gate {label!r}: expected shape ({d}, {d}), got {U.shape}")
    err = np.linalg.norm(U.conj().T @ U - np.eye(d), 2)
    if err > UNITARY_TOL:
        if not (repair and err <= REPAIR_TOL):
            raise GateFileError(
                f"gate {label!r} is not unitary (||U*U - I|| = {err:.3e}); "
                f"pass repair=True to project within {REPAIR_TOL:g}"
            )
        # polar projection onto the unitary group
        W, _, Vh = np.linalg.svd(U)
        U = W @ Vh
    det = np.linalg.det(U)
    if abs(det - 1.0) > DET_SKIP_TOL:
        # principal d-th root keeps the projective class and the branch stable
        U = U * np.exp(-np.log(det) / d)
    U = np.ascontiguousarray(U)
    U.setflags(write=False)
    return U


def make_gateset(d, pairs, symmetric=True, repair=False) -> GateSet:
    """Validate and normalize raw (label, matrix) pairs into a GateSet."""
    if not isinstance(d, int) or d < 2:
        raise DomainError(f"d must be an integer >= 2, got {d!r}")
    if len(pairs) < 1:
        raise DomainError("gate set needs at least one gate")
    labels = [lab for lab, _ in pairs]
    if len(set(labels)) != len(labels):
        raise GateFileError(f"duplicate gate labels: {labels!r}")
    norm_pairs = tuple(
        (str(lab), _normalize_gate(U, d, str(lab), repair)) for lab, U in pairs
    )
    return GateSet(d=d, pairs=norm_pairs, symmetric=bool(symmetric))


@dataclass(frozen=True)
class NetEstimate:
    """Empirical covering report for words of length <= `length`."""

    length: int
    eps: float
    samples: int
    covered_fraction: float
    max_observed_distance: float


def save_gateset(gs: GateSet, path) -> None:
    doc = {
        "d": gs.d,
        "symmetric": gs.symmetric,
        "gates": [
            {
                "label": lab,
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in U],
            }
            for lab, U in gs.pairs
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_gateset(path, repair: bool = False) -> GateSet:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise GateFileError(f"cannot read gate file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GateFileError(f"gate file {path} is not valid JSON: {exc}") from exc
    try:
        d = int(doc["d"])
        symmetric = bool(doc.get("symmetric", True))
        raw = []
        for g in doc["gates"]:
            mat = np.array(
                [[complex(re, im) for re, im in row] for row in g["matrix"]],
                dtype=np.complex128,
            )
            raw.append((g["label"], mat))
    except (KeyError, TypeError, ValueError) as exc:
        raise GateFileError(f"gate file {path} has malformed fields: {exc}") from exc
    return make_gateset(d, raw, symmetric=symmetric, repair=repair)


def _haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed U(d) sample (QR with phase correction)."""
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z / np.sqrt(2.0))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def haar_random_gateset(d: int, k: int, seed: int, symmetric: bool = True) -> GateSet:
    if k < 1:
        raise DomainError(f"need k >= 1 gates, got {k}")
    rng = np.random.default_rng(seed)
    pairs = [(f"g{i + 1}", _haar_unitary(d, rng)) for i in range(k)]
    return make_gateset(d, pairs, symmetric=symmetric)


def _circle_minimax(phases: np.ndarray) -> float:
    """min over theta of max_j 2|sin((theta - psi_j)/2)| for given phases."""
    psi = np.sort(np.mod(phases, 2.0 * pi))
    n = psi.size
    gaps = np.diff(psi, append=psi[0] + 2.0 * pi)

    def objective(theta: float) -> float:
        delta = np.mod(theta - psi, 2.0 * pi)
        delta = np.minimum(delta, 2.0 * pi - delta)
        return float(2.0 * np.max(np.abs(np.sin(0.5 * delta))))

    # candidate centers: midpoint of the covering arc complementary to each gap
    best = min(
        objective(psi[(i + 1) % n] + 0.5 * (2.0 * pi - gaps[i])) for i in range(n)
    )
    # golden-section polish around the best candidate (objective is unimodal
    # near the optimum; this mops up roundoff from the midpoint construction)
    i_star = int(np.argmax(gaps))
    lo = psi[(i_star + 1) % n]
    hi = lo + (2.0 * pi - gaps[i_star])
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1, c2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = objective(c1), objective(c2)
    for _ in range(60):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = objective(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = objective(c2)
    return min(best, f1, f2)


def pu_distance(g: np.ndarray, h: np.ndarray) -> float:
    """Projective distance between two unitaries, accurate to ~1e-9."""
    g = np.asarray(g, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if g.shape != h.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DomainError(f"need equal square matrices, got {g.shape} and {h.shape}")
    for M in (g, h):
        err = np.linalg.norm(M.conj().T @ M - np.eye(M.shape[0]), 2)
        if err > UNITARY_TOL:
            raise DomainError(f"pu_distance argument not unitary ({err:.3e})")
    psi = np.angle(np.linalg.eigvals(g.conj().T @ h))
    return _circle_minimax(psi)


def squared_set(gs: GateSet) -> GateSet:
    """The set of squared gates {U_i^2} with inherited symmetry."""
    pairs = tuple((lab + "^2", _freeze(U @ U)) for lab, U in gs.pairs)
    return GateSet(d=gs.d, pairs=pairs, symmetric=gs.symmetric)


def _freeze(M: np.ndarray) -> np.ndarray:
    M = np.ascontiguousarray(M)
    M.setflags(write=False)
    return M


def universality_heuristic(gs: GateSet, t_probe: int = 3) -> str:
    """Probe whether <S> is dense in PU(d) from the gap at a small scale.

    'not-universal'    — some block norm is 1 up to 1e-8 (an invariant vector
                         certifies a proper closed subgroup at this scale);
    'universal-likely' — all block norms <= 1 - 1e-6;
    'inconclusive'     — in between.
    """
    from .avgop import averaging_block, gap_at_scale

    report = gap_at_scale(gs.symmetrized(), t_probe)
    worst = 1.0 - report.gap
    if worst >= 1.0 - 1e-8:
        # confirm with an explicit near-invariant eigenvector of the block
        B = averaging_block(report.worst_weight, gs.symmetrized())
        vals, vecs = np.linalg.eigh(B)
        i = int(np.argmax(np.abs(vals)))
        v = vecs[:, i]
        resid = float(np.linalg.norm(B @ v - vals[i] * v))
        assert resid <= 1e-8, resid
        return "not-universal"
    if worst <= 1.0 - 1e-6:
        return "universal-likely"
    return "inconclusive"


def _word_count(n_letters: int, length: int) -> int:
    """Words of length <= `length` with no immediate inverse backtracking."""
    total = 1
    level = 1
    for step in range(1, length + 1):
        level = n_letters * level if step == 1 else (n_letters - 1) * level
        total += level
    return total


def empirical_net(
    gs: GateSet,
    length: int,
    eps: float,
    samples: int,
    seed: int = 0,
    word_cap: int = WORD_CAP,
) -> NetEstimate:
    """Covering check: fraction of Haar samples within eps of a word of
    length <= `length` over the symmetric set.

    Words are enumerated breadth-first with immediate-inverse pruning, so the
    word list is free of the trivial g g^-1 cancellations but may still repeat
    group elements for sets with relations.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if length < 0:
        raise DomainError(f"word length must be >= 0, got {length}")
    if samples < 0:
        raise DomainError(f"samples must be >= 0, got {samples}")

    mem = gs.symmetrized().members()
    mats = np.stack([U for _, U in mem])
    n_letters = len(mem)
    k = gs.k
    n_words = _word_count(n_letters, length)
    if n_words > word_cap:
        raise ResourceLimitError(
            f"{n_words} words of length <= {length} exceed the cap {word_cap}; "
            f"reduce the length or raise word_cap"
        )

    if samples == 0:
        warnings.warn("empirical_net called with samples=0; nothing to measure")
        return NetEstimate(length, float(eps), 0, 1.0, 0.0)

    rng = np.random.default_rng(seed)
    targets = np.stack([_haar_unitary(gs.d, rng) for _ in range(samples)])
    best = np.full(samples, np.inf)

    # BFS over words; level arrays carry (word matrix, last letter index)
    d = gs.d
    level_mats = np.eye(d, dtype=np.complex128)[None, :, :]
    level_last = np.array([-1])
    _scan_words(level_mats, targets, best)
    for _ in range(length):
        next_mats, next_last = _extend_level(level_mats, level_last, mats, k)
        if next_mats.shape[0] == 0:
            break
        for lo in range(0, next_mats.shape[0], _BATCH):
            _scan_words(next_mats[lo : lo + _BATCH], targets, best)
        level_mats, level_last = next_mats, next_last

    covered = float(np.mean(best <= eps))
    return NetEstimate(
        length=length,
        eps=float(eps),
        samples=samples,
        covered_fraction=covered,
        max_observed_distance=float(best.max()),
    )


def _extend_level(level_mats, level_last, mats, k):
    """Append every non-backtracking letter to every word in the level."""
    n_letters = mats.shape[0]
    out_mats = []
    out_last = []
    for letter in range(n_letters):
        inverse_letter = (letter + k) % n_letters
        keep = level_last != inverse_letter
        if not np.any(keep):
            continue
        prod = np.einsum("nab,bc->nac", level_mats[keep], mats[letter])
        out_mats.append(prod)
        out_last.append(np.full(prod.shape[0], letter))
    if not out_mats:
        return np.empty((0,) + level_mats.shape[1:], dtype=np.complex128), np.empty(0, int)
    return np.concatenate(out_mats), np.concatenate(out_last)


def _scan_words(words, targets, best) -> None:
    """Tighten best[s] = min(best[s], min_w D(w, target_s)) over the batch."""
    for s in range(targets.shape[0]):
        M = np.einsum("nba,bc->nac", words.conj(), targets[s])
        psi = np.angle(np.linalg.eigvals(M))
        psi = np.sort(np.mod(psi, 2.0 * pi), axis=1)
        gaps = np.diff(psi, axis=1)
        wrap = 2.0 * pi - (psi[:, -1] - psi[:, 0])
        G = np.maximum(gaps.max(axis=1, initial=0.0), wrap)
        dist = 2.0 * np.sin(np.clip((2.0 * pi - G) / 4.0, 0.0, 0.5 * pi))
        best[s] = np.minimum(best[s], dist.min())
