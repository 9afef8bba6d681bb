import numpy as np
import pytest

from stratawave import DegenerateBackgroundError, DomainError, GasParams
from stratawave import thermo
from stratawave import hyperbolic_core as hc


IDEAL_101 = GasParams(alpha=0.0, beta=0.0, gamma=1.01)
VDW = GasParams(alpha=0.35, beta=0.06, gamma=1.01)
EZ = np.array([0.0, 0.0, 1.0])

# (alpha, beta, gamma) grid shared by the oracle-equivalence tests
COEFF_GRID = [
    (a, b, g)
    for a in (0.0, 0.1, 0.25, 0.35, 0.5)
    for b in (0.0, 0.02, 0.06, 0.1, 0.15)
    for g in (1.01, 1.3, 5.0 / 3.0)
]


class TestBuildMatrices:
    def test_third_matrix_entries(self):
        # ideal gas with rho0 = a0 = 1 and p_s = 1 (c_v chosen so (p+a rho^2)/c_v = 1)
        gas = GasParams(alpha=0.0, beta=0.0, gamma=1.4)
        ms = hc.build_matrices(gas, 1.0, 1.0)
        p0 = ms.derivs.p
        assert ms.derivs.p_s == pytest.approx(p0)  # c_v = 1
        a3 = ms.A[2]
        assert a3[2, 3] == pytest.approx(1.0)   # a^2/rho
        assert a3[3, 2] == pytest.approx(1.0)   # rho
        assert a3[2, 4] == pytest.approx(ms.derivs.p_s)
        assert np.all(np.diag(a3) == 0.0)

    def test_off_pattern_entries_zero(self):
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        for k in range(3):
            expected = np.zeros((5, 5))
            expected[3, k] = 0.9
            expected[k, 3] = ms.derivs.f4
            expected[k, 4] = ms.derivs.f5
            assert np.array_equal(ms.A[k], expected)

    def test_source_and_background(self):
        ms = hc.build_matrices(VDW)
        assert np.array_equal(ms.F0, [0.0, 0.0, 1.0, 0.0, 0.0])
        assert np.array_equal(ms.U0, [0.0, 0.0, 0.0, 1.0, 0.0])
        assert ms.nu == VDW.epsilon

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_symbol_eigenvalues(self, seed):
        rng = np.random.default_rng(seed)
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        sym = np.einsum("k,kij->ij", n, ms.A)
        eig = np.sort(np.linalg.eigvals(sym).real)
        expected = np.sort([1.1, -1.1, 0.0, 0.0, 0.0])
        assert np.allclose(eig, expected, atol=1e-12)
        assert np.max(np.abs(np.linalg.eigvals(sym).imag)) < 1e-12


class TestEigenpair:
    def test_unit_background_vectors(self):
        gas = GasParams(alpha=0.0, beta=0.0, gamma=1.4)
        ms = hc.build_matrices(gas, 1.0, 1.0)
        ep = hc.acoustic_eigenpair(ms, EZ)
        assert np.allclose(ep.l, [0.0, 0.0, 1.0, 1.0, ms.derivs.p_s])
        assert np.allclose(ep.r, [0.0, 0.0, 1.0, 1.0, 0.0])
        assert ep.speed == pytest.approx(1.0)

    @pytest.mark.parametrize("rho0,a0", [(1.0, 1.0), (0.7, 1.3), (1.4, 0.6)])
    def test_l_dot_r_is_two(self, rho0, a0):
        ms = hc.build_matrices(VDW, rho0, a0)
        ep = hc.acoustic_eigenpair(ms, np.array([0.3, -0.4, 1.2]))
        assert float(ep.l @ ep.r) == pytest.approx(2.0, abs=1e-14)

    def test_eigen_residuals(self):
        ms = hc.build_matrices(VDW, 0.8, 1.2)
        grad = np.array([0.1, 0.2, 2.0])
        ep = hc.acoustic_eigenpair(ms, grad)
        sym = np.einsum("k,kij->ij", grad, ms.A)
        assert np.linalg.norm(sym @ ep.r - ep.speed * ep.r) < 1e-12 * ep.speed
        assert np.linalg.norm(ep.l @ sym - ep.speed * ep.l) < 1e-12 * ep.speed

    def test_zero_gradient_rejected(self):
        ms = hc.build_matrices(VDW)
        with pytest.raises(DomainError):
            hc.acoustic_eigenpair(ms, np.zeros(3))


class TestGradientTensors:
    def test_analytic_vs_fd(self):
        ms = hc.build_matrices(VDW, 0.9, 1.05)
        an = hc.gradient_tensor(ms)
        fd = hc.gradient_tensor_fd(ms, step=1e-5)
        surviving = np.abs(an) > 0.0
        assert np.max(np.abs((an - fd)[surviving])) < 1e-6
        assert np.max(np.abs(fd[~surviving])) < 1e-8

    def test_entry_values(self):
        # the six nonzero first-derivative families
        ms = hc.build_matrices(VDW, 0.9, 1.05)
        d = ms.derivs
        an = hc.gradient_tensor(ms)
        rho0, a0 = 0.9, 1.05
        for k in range(3):
            assert an[k, k, k, k] == pytest.approx(1.0)            # velocity diagonal
            assert an[k, 3, 3, k] == pytest.approx(1.0)            # d(rho)/drho
            assert an[k, 3, k, 3] == pytest.approx(-a0**2 / rho0**2 + 2.0 * a0 * d.a_rho / rho0)
            assert an[k, 4, k, 3] == pytest.approx(2.0 * a0 * d.a_s / rho0)
            assert an[k, 4, k, 4] == pytest.approx(d.p_ss / rho0)
            # the corrected mixed entry: -p_s/rho^2 + 2 a a_s / rho
            assert an[k, 3, k, 4] == pytest.approx(-d.p_s / rho0**2 + 2.0 * a0 * d.a_s / rho0)

    def test_mixed_entry_differs_from_miscopied_form(self):
        # a transcription that used a_rho instead of a_s in the mixed entry
        # would break the M = N identity; confirm the two differ here
        ms = hc.build_matrices(VDW, 0.9, 1.05)
        d = ms.derivs
        an = hc.gradient_tensor(ms)
        miscopied = -d.p_s / 0.9**2 + 2.0 * 1.05 * d.a_rho / 0.9
        assert abs(an[0, 3, 0, 4] - miscopied) > 1e-3

    def test_hessian_vs_fd(self):
        ms = hc.build_matrices(VDW, 0.9, 1.05)
        an = hc.hessian_tensor(ms)
        fd = hc.hessian_tensor_fd(ms, step=1e-4)
        surviving = np.abs(an) > 0.0
        assert np.max(np.abs((an - fd)[surviving])) < 1e-4
        assert np.max(np.abs(fd[~surviving])) < 1e-6

    def test_surviving_hessian_entry(self):
        # the only second derivative reaching the contraction: d2(a^2/rho)/drho2
        ms = hc.build_matrices(VDW, 1.0, 1.0)
        d = ms.derivs
        an = hc.hessian_tensor(ms)
        assert an[2, 3, 3, 2, 3] == pytest.approx(d.f4_rho_rho, rel=1e-14)


class TestQuadraticContraction:
    def test_ideal_reduction(self):
        gas = GasParams(alpha=0.0, beta=0.0, gamma=1.4)
        ms = hc.build_matrices(gas, 1.0, 1.0)
        assert hc.gamma_numeric(ms, 2.0 * EZ) == pytest.approx(1.2 * 2.0, rel=1e-14)

    @pytest.mark.parametrize("alpha,beta,gamma", COEFF_GRID)
    def test_matches_closed_form(self, alpha, beta, gamma):
        gas = GasParams(alpha=alpha, beta=beta, gamma=gamma)
        ms = hc.build_matrices(gas, 0.9, 1.1)
        num = hc.gamma_numeric(ms, EZ)
        closed = thermo.quadratic_coefficient(gas, 0.9, 1.1, 1.0)
        assert num == pytest.approx(closed, rel=1e-10)

    def test_scaling_in_r(self):
        # degree-1 homogeneity beyond the normalization: scaling r by c scales
        # the contraction by c
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        ep = hc.acoustic_eigenpair(ms, EZ)
        da = hc.gradient_tensor(ms)

        def contraction(r_vec):
            lr = float(ep.l @ r_vec)
            return float(np.einsum("k,kmij,m,i,j->", EZ, da, r_vec, ep.l, r_vec) / lr)

        base = contraction(ep.r)
        assert contraction(3.0 * ep.r) == pytest.approx(3.0 * base, rel=1e-13)


class TestDecompositionVectors:
    @pytest.mark.parametrize("rho0,a0", [(1.0, 1.0), (0.8, 1.2)])
    def test_m_equals_n_and_orthogonality(self, rho0, a0):
        ms = hc.build_matrices(VDW, rho0, a0)
        grad = np.array([0.0, 0.0, 1.4])
        m_vec, n_vec = hc.mn_numeric(ms, grad)
        ep = hc.acoustic_eigenpair(ms, grad)
        assert np.max(np.abs(m_vec - n_vec)) < 1e-13
        assert abs(float(m_vec @ ep.r)) < 1e-12
        assert abs(float(n_vec @ ep.r)) < 1e-12

    def test_truncated_form(self):
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        grad = np.array([0.0, 0.0, 2.0])
        d = ms.derivs
        expected = 2.0 * np.array([0.0, 0.0, 1.0, -1.1 / 0.9, d.a_s])
        assert np.allclose(hc.mn_truncated(ms, grad), expected, rtol=1e-14)
        # truncated form is orthogonal to r as well
        ep = hc.acoustic_eigenpair(ms, grad)
        assert abs(float(hc.mn_truncated(ms, grad) @ ep.r)) < 1e-12

    def test_truncation_gap_scales_with_quadratic_coefficient(self):
        # exact minus truncated is the identified multiple of the quadratic
        # coefficient
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        grad = np.array([0.0, 0.0, 1.0])
        ep = hc.acoustic_eigenpair(ms, grad)
        gam = hc.gamma_numeric(ms, grad)
        m_vec, _ = hc.mn_numeric(ms, grad)
        d = ms.derivs
        gap = 0.5 * gam * np.array(
            [-ep.n[0], -ep.n[1], -ep.n[2], 1.1 / 0.9, -d.p_s / (0.9 * 1.1)]
        )
        assert np.allclose(m_vec - hc.mn_truncated(ms, grad), gap, atol=1e-13)


class TestOmegaDeltaCoeffs:
    def test_solve_matches_closed_form(self):
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        grad = np.array([0.0, 0.0, 1.7])
        om_n, de_n = hc.omega_delta_coeffs(ms, grad)
        om_c, de_c = hc.omega_delta_closed_form(ms, grad)
        assert np.allclose(om_n, om_c, atol=1e-12)
        assert np.allclose(de_n, de_c, atol=1e-12)

    def test_reconstructs_target(self):
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        grad = np.array([0.0, 0.0, 1.7])
        ep = hc.acoustic_eigenpair(ms, grad)
        om, _ = hc.omega_delta_coeffs(ms, grad)
        bmat = hc._b_matrix(ms, grad, ep.speed)
        assert np.allclose(bmat[:4].T @ om, hc.mn_truncated(ms, grad), atol=1e-12)

    def test_degenerate_background_raises(self):
        ms = hc.build_matrices(VDW, 0.9, 1.1)
        broken = hc.SystemMatrices(
            gas=ms.gas, rho0=ms.rho0, a0=ms.a0, A=ms.A, F0=ms.F0, U0=ms.U0, nu=ms.nu,
            derivs=type(ms.derivs)(**{**ms.derivs.__dict__, "p_s": 0.0}),
        )
        with pytest.raises(DegenerateBackgroundError):
            hc.omega_delta_coeffs(broken, EZ)


class TestEliminationContraction:
    def test_elimination_term_on_ideal_background(self):
        # (omega + 2 delta) . w = 6 |grad phi| / a0 with truncation
        gas = GasParams(alpha=0.0, beta=0.0, gamma=1.4)
        for a0, norm in [(1.0, 1.0), (1.2, 2.4)]:
            ms = hc.build_matrices(gas, 1.0, a0)
            grad = norm * EZ
            e_t = hc.e_numeric(ms, grad, truncate=True)
            lam_t = hc.lambda_numeric(ms, grad, truncate=True)
            assert e_t - lam_t == pytest.approx(6.0 * norm / a0, rel=1e-12)

    @pytest.mark.parametrize("alpha,beta,gamma", COEFF_GRID)
    def test_lambda_matches_density_derivative_route(self, alpha, beta, gamma):
        gas = GasParams(alpha=alpha, beta=beta, gamma=gamma)
        ms = hc.build_matrices(gas, 0.9, 1.1)
        grad = np.array([0.0, 0.0, 1.3])
        lam = hc.lambda_numeric(ms, grad, truncate=True)
        oracle = thermo.cubic_nonlinearity_exact(gas, 0.9, 1.1) * 1.3 / 1.1
        assert lam == pytest.approx(oracle, rel=1e-10)

    def test_e_truncated_value(self):
        # E reduces to (6 + Omega)|grad phi|/a0 under truncation
        ms = hc.build_matrices(VDW, 1.0, 1.0)
        e_t = hc.e_numeric(ms, EZ, truncate=True)
        omega = thermo.cubic_nonlinearity_exact(VDW, 1.0, 1.0)
        assert e_t == pytest.approx(6.0 + omega, rel=1e-12)

    def test_untruncated_lambda_differs(self):
        ms = hc.build_matrices(VDW, 1.0, 1.0)
        lam_t = hc.lambda_numeric(ms, EZ, truncate=True)
        lam_x = hc.lambda_numeric(ms, EZ, truncate=False)
        assert abs(lam_t - lam_x) > 1e-3  # quadratic-coefficient content is visible


class TestChiContraction:
    def test_plane_wave_homogeneous(self):
        ms = hc.build_matrices(VDW, 1.0, 1.0)
        assert hc.chi_numeric(ms, EZ, rho0_prime=0.0, s0_prime=0.0) == pytest.approx(0.0, abs=1e-15)

    def test_stratified_plane_wave_matches_closed_form(self, baseline_gas, baseline_atm):
        from stratawave import atmosphere as atmo

        t = 1.4
        x3 = atmo.height_at(baseline_atm, t)
        rho0, a0 = atmo.profiles(baseline_atm, x3)
        ms = hc.build_matrices(baseline_gas, rho0, a0)
        grad = np.array([0.0, 0.0, atmo.grad_phi_norm_at(baseline_atm, t)])
        rho0_prime = -baseline_atm.theta * rho0
        s0_prime = atmo.entropy_height_derivative(baseline_gas, baseline_atm, t)
        chi_n = hc.chi_numeric(ms, grad, rho0_prime, s0_prime, truncate=True)
        chi_c = atmo.chi(baseline_gas, baseline_atm, t)
        assert chi_n == pytest.approx(chi_c, rel=1e-12)

    def test_spherical_front_curvature(self):
        # theta = 0, homogeneous entropy: chi = a0/r for div n = 2/r
        gas = GasParams(alpha=0.0, beta=0.0, gamma=1.4)
        ms = hc.build_matrices(gas, 1.0, 1.0)
        r = 2.5
        n = EZ
        dn_dx = (np.eye(3) - np.outer(n, n)) / r
        chi_n = hc.chi_numeric(ms, EZ, rho0_prime=0.0, s0_prime=0.0, dn_dx=dn_dx)
        assert chi_n == pytest.approx(1.0 / r, rel=1e-14)


class TestVerifyReport:
    def test_all_pass_on_baseline(self):
        checks = hc.verify_report(VDW)
        assert all(c.passed for c in checks)
        names = {c.name for c in checks}
        assert "quadratic_contraction_vs_closed_form" in names
        assert "cubic_elimination_vs_density_derivative" in names
