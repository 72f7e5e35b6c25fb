import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapforge.errors import DomainError, ResourceLimitError
from gapforge.gates import _haar_unitary
from gapforge.irrep import (
    algebra_image,
    build_basis,
    cached_basis,
    check_generator_relations,
    frobenius_schur_montecarlo,
    irrep_matrix,
    weyl_character,
)
from gapforge.weightlat import Weight, enumerate_nontrivial_weights, weyl_dimension


def rand_unitary(d, seed):
    return _haar_unitary(d, np.random.default_rng(seed))


def su_basis(d):
    """Orthonormal (Frobenius) Hermitian traceless basis of su(d)."""
    out = []
    for a in range(d):
        for b in range(a + 1, d):
            X = np.zeros((d, d), dtype=complex)
            X[a, b] = X[b, a] = 1 / np.sqrt(2)
            out.append(X)
            Y = np.zeros((d, d), dtype=complex)
            Y[a, b] = -1j / np.sqrt(2)
            Y[b, a] = 1j / np.sqrt(2)
            out.append(Y)
    for a in range(1, d):
        Z = np.zeros((d, d), dtype=complex)
        Z[:a, :a] = np.eye(a)
        Z[a, a] = -a
        Z /= np.sqrt(a * (a + 1))
        out.append(Z)
    return out


class TestBasisStructure:
    def test_trivial_weight(self):
        b = build_basis(Weight((0, 0)))
        assert b.dim == 1

    def test_adjoint_su2(self):
        b = build_basis(Weight((1, -1)))
        assert b.dim == 3
        cartan = (b.generator_images[(1, 1)] - b.generator_images[(2, 2)]).todense()
        assert sorted(np.real(np.diag(cartan)).tolist()) == [-2.0, 0.0, 2.0]

    def test_dims_match_weyl(self):
        for w in enumerate_nontrivial_weights(3, 3):
            assert build_basis(w).dim == weyl_dimension(w)

    def test_pattern_weights_sum_zero(self):
        b = build_basis(Weight((2, 0, -2)))
        assert np.all(b.pattern_weights.sum(axis=1) == 0)

    def test_dim_cap(self):
        with pytest.raises(ResourceLimitError):
            build_basis(Weight((30, 0, 0, -30)), dim_cap=1000)

    def test_d_mismatch(self):
        with pytest.raises(DomainError):
            build_basis(Weight((1, -1)), d=3)

    @pytest.mark.parametrize(
        "entries",
        [(1, -1), (3, -3), (1, 0, -1), (2, -1, -1), (2, 0, -2), (1, 0, 0, -1), (2, 1, -1, -2)],
    )
    def test_commutation_relations(self, entries):
        assert check_generator_relations(build_basis(Weight(entries)), tol=1e-10) <= 1e-10

    def test_cached_basis_identity(self):
        assert cached_basis(Weight((2, -2))) is cached_basis(Weight((2, -2)))


class TestCasimir:
    def test_adjoint_casimir_matches_structure_constants(self):
        # su(3) Casimir of the GT-built (1,0,-1) rep vs the same invariant on
        # the adjoint rep built directly from structure constants
        basis = build_basis(Weight((1, 0, -1)))
        gens = su_basis(3)

        cas_gt = np.zeros((basis.dim, basis.dim), dtype=complex)
        for T in gens:
            img = algebra_image(basis, T)
            cas_gt += img @ img
        scal_gt = cas_gt[0, 0].real
        assert np.allclose(cas_gt, scal_gt * np.eye(basis.dim), atol=1e-10)

        n = len(gens)
        ad = np.zeros((n, n, n), dtype=complex)  # ad[k][l, j] = <T_l, [T_k, T_j]>
        for k, Tk in enumerate(gens):
            for j, Tj in enumerate(gens):
                comm = Tk @ Tj - Tj @ Tk
                for l, Tl in enumerate(gens):
                    ad[k][l, j] = np.trace(Tl.conj().T @ comm)
        cas_ad = sum(ad[k] @ ad[k] for k in range(n))
        scal_ad = cas_ad[0, 0].real
        assert np.allclose(cas_ad, scal_ad * np.eye(n), atol=1e-10)

        # both are the adjoint irrep, so the invariants agree
        assert scal_gt == pytest.approx(scal_ad, abs=1e-10)

    def test_gl_casimir_scalar(self):
        # sum_ab E_ab E_ba must be a scalar on any irrep (Schur), with value
        # sum_i m_i (m_i + d + 1 - 2i) on the shifted signature
        for entries in [(1, -1), (2, 0, -2), (1, 1, -2)]:
            b = build_basis(Weight(entries))
            d = b.d
            cas = np.zeros((b.dim, b.dim), dtype=complex)
            for a in range(1, d + 1):
                for c in range(1, d + 1):
                    cas += (b._full_images[(a, c)] @ b._full_images[(c, a)]).todense()
            sig = tuple(x + b.shift for x in entries)
            want = sum(m * (m + d + 1 - 2 * (i + 1)) for i, m in enumerate(sig))
            assert np.allclose(cas, want * np.eye(b.dim), atol=1e-10)


class TestIrrepMatrix:
    def test_identity(self):
        b = build_basis(Weight((1, -1)))
        assert np.allclose(irrep_matrix(b, np.eye(2)), np.eye(3), atol=1e-12)

    def test_torus_adjoint_spectrum(self):
        # diag(e^{i phi}, e^{-i phi}) acts on the adjoint with phases 2phi, 0, -2phi
        b = build_basis(Weight((1, -1)))
        phi = 0.37
        U = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
        P = irrep_matrix(b, U)
        got = np.sort(np.angle(np.linalg.eigvals(P)))
        want = np.sort([2 * phi, 0.0, -2 * phi])
        assert np.allclose(got, want, atol=1e-10)

    def test_adjoint_against_conjugation_action(self):
        # pi_(1,0,-1)(U) is unitarily equivalent to X -> U X U^dagger on
        # traceless matrices; compare characters, which are basis-free
        b = build_basis(Weight((1, 0, -1)))
        for seed in range(6):
            U = rand_unitary(3, seed)
            got = np.trace(irrep_matrix(b, U))
            want = abs(np.trace(U)) ** 2 - 1.0
            assert got == pytest.approx(want, abs=1e-8)

    @pytest.mark.parametrize("entries", [(1, -1), (4, -4), (2, -1, -1), (2, 0, -2), (1, 0, 0, -1)])
    def test_unitarity_and_homomorphism(self, entries):
        b = build_basis(Weight(entries))
        d = b.d
        U = rand_unitary(d, 11)
        V = rand_unitary(d, 12)
        PU = irrep_matrix(b, U)
        PV = irrep_matrix(b, V)
        PUV = irrep_matrix(b, U @ V)
        n = b.dim
        assert np.linalg.norm(PU.conj().T @ PU - np.eye(n), 2) <= 1e-8
        assert np.linalg.norm(PU @ PV - PUV, 2) <= 1e-6
        Pinv = irrep_matrix(b, U.conj().T)
        assert np.linalg.norm(Pinv - PU.conj().T, 2) <= 1e-6

    def test_projective_phase_invariance(self):
        b = build_basis(Weight((2, 0, -2)))
        U = rand_unitary(3, 4)
        for theta in (0.1, 2.0, np.pi / 3, 2 * np.pi / 3):
            P1 = irrep_matrix(b, U)
            P2 = irrep_matrix(b, np.exp(1j * theta) * U)
            assert np.linalg.norm(P1 - P2, 2) <= 1e-10

    def test_character_matches_weyl(self):
        for entries, d in [((1, -1), 2), ((2, -2), 2), ((1, 0, -1), 3), ((2, -1, -1), 3)]:
            b = build_basis(Weight(entries))
            U = rand_unitary(d, 21)
            phases = np.angle(np.linalg.eigvals(U))
            got = np.trace(irrep_matrix(b, U))
            want = weyl_character(Weight(entries), phases)
            # the character of the projective rep picks up the centering phase,
            # which is trivial here because |lambda| = 0
            assert got == pytest.approx(want, abs=1e-6)

    def test_rejects_nonunitary(self):
        b = build_basis(Weight((1, -1)))
        with pytest.raises(DomainError):
            irrep_matrix(b, np.array([[1.0, 0.1], [0.0, 1.0]]))

    @settings(max_examples=15)
    @given(st.integers(0, 10_000))
    def test_unitary_output_property(self, seed):
        b = cached_basis(Weight((3, -3)))
        U = rand_unitary(2, seed)
        P = irrep_matrix(b, U)
        assert np.linalg.norm(P.conj().T @ P - np.eye(b.dim), 2) <= 1e-8


class TestWeylCharacter:
    def test_trivial(self):
        assert weyl_character(Weight((0, 0)), [0.3, -0.3]) == pytest.approx(1.0)

    def test_su2_adjoint_formula(self):
        phi = 0.81
        got = weyl_character(Weight((1, -1)), [phi, -phi])
        want = np.exp(2j * phi) + 1 + np.exp(-2j * phi)
        assert got == pytest.approx(want, abs=1e-10)

    def test_dimension_at_identity(self):
        for entries in [(1, -1), (2, 0, -2), (2, -1, -1)]:
            w = Weight(entries)
            with pytest.warns(UserWarning, match="near-coincident"):
                val = weyl_character(w, np.zeros(w.d))
            assert val == pytest.approx(weyl_dimension(w), abs=1e-6)

    def test_perturbed_fallback_accuracy(self):
        # one nearly-degenerate pair, exact value from the su(2) spin formula
        w = Weight((2, -2))
        phi = 0.5e-9
        with pytest.warns(UserWarning, match="near-coincident"):
            got = weyl_character(w, np.array([phi, -phi]))
        want = sum(np.exp(2j * m * phi) for m in range(-2, 3))
        assert got == pytest.approx(want, abs=1e-5)

    def test_wrong_phase_count(self):
        with pytest.raises(DomainError):
            weyl_character(Weight((1, -1)), [0.1, 0.2, 0.3])


class TestFrobeniusSchurMC:
    @pytest.mark.parametrize(
        "entries,want",
        [((1, -1), 1), ((1, 0, -1), 1), ((2, -1, -1), 0), ((1, 1, -2), 0)],
    )
    def test_montecarlo_indicator(self, entries, want):
        est = frobenius_schur_montecarlo(Weight(entries), n_samples=3000, seed=99)
        assert abs(est - want) <= 0.15  # ~8 sigma at N=3000
