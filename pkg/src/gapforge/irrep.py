"""Explicit unitary irrep matrices via Gelfand-Tsetlin bases.

For a dominant sum-zero weight lambda we realize the irrep on the orthonormal
GT basis of the shifted nonnegative signature mu = lambda - lambda_d * 1 (the
shift is invisible after exponentiating a traceless algebra element, since the
weights of the shifted rep differ by a constant that multiplies tr X = 0).

Generator matrices follow the standard unitary GT formulas: the simple raising
operator E_{l,l+1} sends a pattern M to sum_k c_k(M) * (M + delta_{k,l}) with

    c_k(M)^2 = - prod_{j=1}^{l+1} (a_{j,l+1} - a_{k,l})
                 * prod_{j=1}^{l-1} (a_{j,l-1} - a_{k,l} - 1)
               / prod_{j != k}      (a_{j,l} - a_{k,l}) (a_{j,l} - a_{k,l} - 1)

where a_{k,l} = m_{k,l} - k.  Moves that break interlacing are skipped (their
numerator vanishes, but the denominator can too, so the formula must not be
evaluated there).  Lowering operators are adjoints, Cartan elements diagonal
with entries rowsum_l - rowsum_{l-1}.

Group elements are produced by eigendecomposing U, centering the eigenphases
to sum zero (the canonical traceless logarithm), pushing the logarithm through
the algebra representation and re-exponentiating with a Hermitian eigensolve.
The result is unitary to machine precision and, because all pattern weights
are integral and sum-zero kills the overall phase, independent of the phase
convention of U up to ~1e-10.
"""

from __future__ import annotations

import hashlib
import threading
import warnings
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ResourceLimitError
from .weightlat import Weight, enumerate_weights, weyl_dimension

__all__ = [
    "GTBasis",
    "build_basis",
    "cached_basis",
    "irrep_matrix",
    "algebra_image",
    "weyl_character",
    "check_generator_relations",
    "frobenius_schur_montecarlo",
    "DIM_CAP",
]

DIM_CAP = 2_000_000  # refuse to build bases above this dimension
UNITARY_TOL = 1e-10  # input gates must be unitary to this accuracy


@dataclass(frozen=True)
class GTBasis:
    """Gelfand-Tsetlin basis of one irrep.

    patterns: tuple of GT patterns; a pattern is a tuple of rows, rows[l-1]
        of length l, rows[-1] the shifted signature.  Order is lexicographic
        descending on the flattened rows, a fixed convention that makes every
        downstream matrix deterministic.
    generator_images: {(a, b): sparse matrix} for the Cartan elements (a, a)
        and the simple raising/lowering pairs (l, l+1), (l+1, l).
    """

    weight: Weight
    patterns: tuple
    generator_images: dict
    shift: int
    pattern_weights: np.ndarray = field(repr=False)  # (dim, d) int, unshifted
    _full_images: dict = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.patterns)

    @property
    def d(self) -> int:
        return self.weight.d


def _enumerate_patterns(sig: tuple) -> list:
    """All GT patterns with top row sig, descending lex on (row_{d-1},...,row_1)."""
    d = len(sig)
    patterns = []

    def descend(rows):
        upper = rows[-1]
        l = len(upper) - 1
        if l == 0:
            patterns.append(tuple(reversed(rows)))
            return
        choices = [range(upper[i], max(upper[i + 1] - 1, -1), -1) for i in range(l)]

        def rec(prefix, i):
            if i == l:
                descend(rows + [tuple(prefix)])
                return
            for v in choices[i]:
                # nonincreasing within the row follows from interlacing with
                # the row above; guard kept as a cheap defensive check
                assert not prefix or v <= prefix[-1]
                rec(prefix + [v], i + 1)

        rec([], 0)

    descend([tuple(sig)])
    return patterns


def _pattern_weight(pattern: tuple, d: int) -> tuple:
    rs = [sum(pattern[l]) for l in range(d)]
    return tuple(rs[0:1] + [rs[l] - rs[l - 1] for l in range(1, d)])


def build_basis(weight: Weight, d: int | None = None, dim_cap: int = DIM_CAP) -> GTBasis:
    """Construct the GT basis and generator images for one weight.

    Raises ResourceLimitError if the Weyl dimension exceeds dim_cap before
    any pattern is materialized.
    """
    if d is not None and d != weight.d:
        raise DomainError(f"weight {weight.entries!r} has d={weight.d}, expected {d}")
    d = weight.d
    dim = weyl_dimension(weight)
    if dim > dim_cap:
        raise ResourceLimitError(
            f"irrep {weight.entries!r} has dimension {dim} > cap {dim_cap}"
        )
    shift = -weight.entries[-1]
    sig = tuple(x + shift for x in weight.entries)

    patterns = _enumerate_patterns(sig)
    assert len(patterns) == dim
    index = {p: i for i, p in enumerate(patterns)}

    pw = np.empty((dim, d), dtype=np.int64)
    for i, p in enumerate(patterns):
        pw[i] = _pattern_weight(p, d)
    pw -= shift  # back to the sum-zero normalization
    assert np.all(pw.sum(axis=1) == 0)  # every pattern weight sums to |lambda| = 0

    images: dict = {}
    # Cartan elements: diagonal in the GT basis, integer entries
    for a in range(1, d + 1):
        diag = (pw[:, a - 1] + shift).astype(np.float64)
        images[(a, a)] = sp.diags(diag, format="csr", dtype=np.complex128)

    # simple raising operators, then adjoints
    for l in range(1, d):
        rows_i, cols_i, vals = [], [], []
        for i, p in enumerate(patterns):
            row = p[l - 1]
            for k in range(l):
                bumped = row[:k] + (row[k] + 1,) + row[k + 1 :]
                target = p[: l - 1] + (bumped,) + p[l:]
                j = index.get(target)
                if j is None:
                    continue  # interlacing broken, amplitude is zero
                akl = row[k] - (k + 1)
                num = 1
                for jj in range(l + 1):
                    num *= p[l][jj] - (jj + 1) - akl
                for jj in range(l - 1):
                    num *= p[l - 2][jj] - (jj + 1) - akl - 1
                num = -num
                den = 1
                for jj in range(l):
                    if jj == k:
                        continue
                    ajl = row[jj] - (jj + 1)
                    den *= (ajl - akl) * (ajl - akl - 1)
                assert den != 0 and num >= 0, (p, k, num, den)
                rows_i.append(j)
                cols_i.append(i)
                vals.append(sqrt(num / den))
        images[(l, l + 1)] = sp.csr_matrix(
            (np.asarray(vals, dtype=np.complex128), (rows_i, cols_i)), shape=(dim, dim)
        )
        images[(l + 1, l)] = images[(l, l + 1)].conj().T.tocsr()

    basis = GTBasis(
        weight=weight,
        patterns=tuple(patterns),
        generator_images=images,
        shift=shift,
        pattern_weights=pw,
    )
    _fill_nonsimple(basis)
    return basis


def _fill_nonsimple(basis: GTBasis) -> None:
    """Derive E_ab for |a-b| > 1 from nested commutators; store all pairs."""
    d = basis.d
    full = basis._full_images
    full.update(basis.generator_images)
    for span in range(2, d):
        for a in range(1, d - span + 1):
            b = a + span
            e_ab = full[(a, b - 1)] @ full[(b - 1, b)] - full[(b - 1, b)] @ full[(a, b - 1)]
            full[(a, b)] = e_ab.tocsr()
            full[(b, a)] = e_ab.conj().T.tocsr()


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def cached_basis(weight: Weight, dim_cap: int = DIM_CAP) -> GTBasis:
    """Thread-safe basis cache: lock-free reads, single-writer insertion."""
    key = weight.entries
    basis = _CACHE.get(key)
    if basis is not None:
        return basis
    built = build_basis(weight, dim_cap=dim_cap)
    with _CACHE_LOCK:
        return _CACHE.setdefault(key, built)


def algebra_image(basis: GTBasis, X: np.ndarray) -> np.ndarray:
    """d(pi)(X) for an arbitrary gl(d) element X, as a dense matrix."""
    d = basis.d
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (d, d):
        raise DomainError(f"algebra element must be {d}x{d}, got {X.shape}")
    acc = None
    for (a, b), mat in basis._full_images.items():
        coeff = X[a - 1, b - 1]
        if coeff == 0:
            continue
        term = mat.multiply(coeff)
        acc = term if acc is None else acc + term
    if acc is None:
        return np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    return np.asarray(acc.todense())


def _check_unitary(U: np.ndarray, d: int | None = None, tol: float = UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError(f"gate must be square, got shape {U.shape}")
    if d is not None and U.shape[0] != d:
        raise DomainError(f"gate must be {d}x{d}, got {U.shape}")
    n = U.shape[0]
    err = np.linalg.norm(U.conj().T @ U - np.eye(n), 2)
    if err > tol:
        raise DomainError(f"gate is not unitary: ||U*U - I|| = {err:.3e} > {tol:g}")
    return U


def irrep_matrix(basis: GTBasis, U: np.ndarray, check: bool = True) -> np.ndarray:
    """pi_lambda(U) in the GT basis; unitary to ~1e-12, phase-convention
    independent to ~1e-10.

    U is eigendecomposed by a complex Schur factorization (exactly unitary
    eigenvectors even for degenerate spectra), its eigenphases centered to the
    traceless logarithm X0, and exp(d(pi)(X0)) evaluated by a Hermitian
    eigensolve of -i d(pi)(X0).
    """
    U = _check_unitary(U, basis.d) if check else np.asarray(U, dtype=np.complex128)
    if basis.dim == 1:
        return np.ones((1, 1), dtype=np.complex128)

    T, Z = _schur_unitary(U)
    theta = np.angle(T)
    theta = theta - theta.mean()
    X0 = (Z * (1j * theta)) @ Z.conj().T

    H = -1j * algebra_image(basis, X0)
    H = 0.5 * (H + H.conj().T)
    off = H.copy()
    np.fill_diagonal(off, 0.0)
    if not off.any():
        # torus element: H already diagonal, exponentiate directly
        return np.diag(np.exp(1j * np.real(np.diag(H)))).astype(np.complex128)
    w, W = np.linalg.eigh(H)
    return (W * np.exp(1j * w)) @ W.conj().T


def _schur_unitary(U: np.ndarray):
    """Eigenvalues and exactly-unitary eigenvectors of a unitary matrix."""
    import scipy.linalg

    T, Z = scipy.linalg.schur(U, output="complex")
    diag = np.diag(T)
    # normal + triangular => diagonal; anything off-diagonal is roundoff
    resid = np.abs(T - np.diag(diag)).max()
    assert resid < 1e-8, resid
    return diag / np.abs(diag), Z


def weyl_character(weight: Weight, phases) -> complex:
    """Character of the irrep at a group element with the given eigenphases.

    Ratio of alternants det(x_i^{lambda_j + d - j}) / det(x_i^{d - j}) with
    x_i = exp(i phi_i).  Near-coincident phases (circular gap < 1e-8) make the
    ratio 0/0; we then warn and fall back to averaging two symmetrically
    perturbed evaluations, which is accurate to O(h^2) with h = 1e-5.
    """
    lam = weight.entries
    d = weight.d
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (d,):
        raise DomainError(f"need {d} phases, got shape {phases.shape}")

    x = np.exp(1j * phases)
    dists = [abs(x[i] - x[j]) for i in range(d) for j in range(i + 1, d)]
    if min(dists) >= 1e-8:
        return _alternant_ratio(lam, phases)

    warnings.warn(
        f"near-coincident eigenphases (gap {min(dists):.2e}); using perturbed evaluation",
        stacklevel=2,
    )
    if max(dists) < 1e-8:
        # fully degenerate torus element: chi = dim * exp(i |lambda| phi) = dim
        return complex(weyl_dimension(weight))
    # step size balances the h^2 truncation error against roundoff in the
    # alternant, whose denominator shrinks like h^(#clustered pairs)
    p = sum(1 for dd in dists if dd < 1e-3)
    h = (2.3e-16) ** (1.0 / (p + 2))
    ramp = np.arange(d, dtype=np.float64)
    ramp -= ramp.mean()
    plus = _alternant_ratio(lam, phases + h * ramp)
    minus = _alternant_ratio(lam, phases - h * ramp)
    return 0.5 * (plus + minus)


def _alternant_ratio(lam, phases) -> complex:
    d = len(lam)
    expo_num = np.array([lam[j] + d - 1 - j for j in range(d)], dtype=np.float64)
    expo_den = np.arange(d - 1, -1, -1, dtype=np.float64)
    num = np.linalg.det(np.exp(1j * np.outer(phases, expo_num)))
    den = np.linalg.det(np.exp(1j * np.outer(phases, expo_den)))
    return complex(num / den)


def check_generator_relations(basis: GTBasis, tol: float = 1e-10) -> float:
    """Max violation of [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb over all
    generator pairs; raises AssertionError above tol.  Returns the residual."""
    d = basis.d
    full = basis._full_images
    worst = 0.0
    pairs = list(full.keys())
    for (a, b) in pairs:
        for (c, e) in pairs:
            lhs = full[(a, b)] @ full[(c, e)] - full[(c, e)] @ full[(a, b)]
            rhs = sp.csr_matrix(lhs.shape, dtype=np.complex128)
            if b == c:
                rhs = rhs + full[(a, e)]
            if e == a:
                rhs = rhs - full[(c, b)]
            resid = abs(lhs - rhs).max() if (lhs - rhs).nnz else 0.0
            worst = max(worst, float(resid))
    assert worst <= tol, f"commutation relations violated: {worst:.3e}"
    return worst


def frobenius_schur_montecarlo(weight: Weight, n_samples: int, seed: int) -> float:
    """Monte Carlo estimate of int chi_lambda(g^2) dmu(g) over PU(d)'s cover.

    Converges to the Frobenius-Schur indicator at the usual N^{-1/2} rate;
    used as an independent oracle for the combinatorial indicator.
    """
    from .gates import _haar_unitary

    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(n_samples):
        g = _haar_unitary(weight.d, rng)
        phases = np.angle(np.linalg.eigvals(g @ g))
        total += weyl_character(weight, phases).real
    return total / n_samples


def bases_up_to_scale(d: int, t: int, dim_cap: int = DIM_CAP):
    """Convenience: cached bases for every nontrivial weight up to scale t."""
    return {
        w: cached_basis(w, dim_cap=dim_cap)
        for w in enumerate_weights(d, t)
        if not w.is_trivial()
    }
