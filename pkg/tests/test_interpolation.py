import math

import numpy as np
import pytest

from mixspec import (
    CoupleError,
    DimensionError,
    NormalizationError,
    ParameterError,
    UndefinedRatioError,
    assemble_local_stiffness,
    assemble_mass,
    build_mesh,
    check_inclusion_monotonicity,
    check_interpolation_inequality,
    check_operator_interpolation,
    couple_from_grams,
    interpolation_norm,
    k2_functional,
    k_curve,
    k_functional,
    operator_norm,
    spectral_s_norm,
    symmetry_check,
)
from mixspec.interpolation import KFunctionalCurve, k_functional_samples
from mixspec.reference import k_functional_grid_search, operator_norm_power_iteration


def random_spd(dim, rng, spread=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    vals = np.exp(rng.uniform(-math.log(spread), math.log(spread), dim))
    return q @ np.diag(vals) @ q.T


def random_couple(dim, rng, spread=10.0):
    return couple_from_grams(random_spd(dim, rng, spread), random_spd(dim, rng, spread))


class TestCoupleConstruction:
    def test_identical_norms(self):
        couple = couple_from_grams(np.eye(3), np.eye(3))
        np.testing.assert_allclose(couple.mu, 1.0, rtol=1e-14)

    def test_already_diagonal(self):
        couple = couple_from_grams(np.eye(2), np.diag([1.0, 4.0]))
        np.testing.assert_allclose(np.sort(couple.mu), [1.0, 4.0], rtol=1e-14)
        np.testing.assert_allclose(np.abs(couple.basis), np.eye(2), atol=1e-14)

    def test_fem_l2_h1_couple(self):
        mesh = build_mesh(0.0, 1.0, 8)
        mass = assemble_mass(mesh).data
        a_loc = assemble_local_stiffness(mesh).data
        couple = couple_from_grams(mass, mass + a_loc)
        # independent route: eigenvalues of M^{-1} A_loc
        pencil_eigs = np.sort(np.linalg.eigvals(np.linalg.solve(mass, a_loc)).real)
        np.testing.assert_allclose(couple.mu, 1.0 + pencil_eigs, rtol=1e-10)

    def test_reconstruction_identities(self):
        rng = np.random.default_rng(5)
        couple = random_couple(6, rng)
        assert couple.residual <= 1e-10
        f = rng.standard_normal(6)
        c = couple.coords(f)
        assert couple.norm_x(f) ** 2 == pytest.approx(np.sum(c**2), rel=1e-12)
        assert couple.norm_y(f) ** 2 == pytest.approx(np.sum(couple.mu * c**2), rel=1e-12)

    def test_invalid_couples(self):
        with pytest.raises(CoupleError):
            couple_from_grams(np.diag([1.0, -1.0]), np.eye(2))
        with pytest.raises(CoupleError):
            couple_from_grams(np.array([[1.0, 2.0], [0.0, 1.0]]), np.eye(2))
        with pytest.raises(DimensionError):
            couple_from_grams(np.eye(2), np.eye(3))


class TestKFunctional:
    def test_zero_element(self):
        couple = couple_from_grams(np.eye(3), np.diag([1.0, 2.0, 3.0]))
        assert k_functional(couple, np.zeros(3), 0.7) == 0.0

    def test_one_dimensional_closed_form(self):
        couple = couple_from_grams(np.array([[1.0]]), np.array([[9.0]]))
        for x in (0.05, 1.0 / 3.0, 0.5, 2.0):
            assert k_functional(couple, [2.0], x) == pytest.approx(
                2.0 * min(1.0, 3.0 * x), abs=1e-12
            )

    def test_x_one_is_sum_norm(self):
        rng = np.random.default_rng(3)
        g_x, g_y = random_spd(3, rng), random_spd(3, rng)
        couple = couple_from_grams(g_x, g_y)
        f = rng.standard_normal(3)
        oracle = k_functional_grid_search(g_x, g_y, f, 1.0)
        assert k_functional(couple, f, 1.0) == pytest.approx(oracle, abs=1e-4)

    def test_grid_search_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            g_x, g_y = random_spd(3, rng), random_spd(3, rng)
            couple = couple_from_grams(g_x, g_y)
            f = rng.standard_normal(3)
            x = float(np.exp(rng.uniform(-1.5, 1.5)))
            assert k_functional(couple, f, x) == pytest.approx(
                k_functional_grid_search(g_x, g_y, f, x), abs=1e-3
            )

    def test_parameter_domain(self):
        couple = couple_from_grams(np.eye(2), np.eye(2))
        with pytest.raises(ParameterError):
            k_functional(couple, np.ones(2), 0.0)
        with pytest.raises(ParameterError):
            k_functional(couple, np.ones(2), -1.0)


class TestK2Functional:
    def test_zero(self):
        couple = couple_from_grams(np.eye(2), np.eye(2))
        assert k2_functional(couple, np.zeros(2), 1.0) == 0.0

    def test_one_mode_value(self):
        couple = couple_from_grams(np.array([[1.0]]), np.array([[1.0]]))
        assert k2_functional(couple, [1.0], 1.0) == pytest.approx(math.sqrt(0.5), rel=1e-14)

    def test_bracketing(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            dim = int(rng.integers(1, 7))
            couple = random_couple(dim, rng)
            f = rng.standard_normal(dim)
            x = float(np.exp(rng.uniform(-5, 5)))
            k = k_functional(couple, f, x)
            k2 = k2_functional(couple, f, x)
            assert k2 <= k * (1 + 1e-12)
            assert k <= math.sqrt(2.0) * k2 * (1 + 1e-12)


class TestSymmetry:
    def test_fixed_point_x_one(self):
        rng = np.random.default_rng(4)
        couple = random_couple(4, rng)
        f = rng.standard_normal(4)
        rep = symmetry_check(couple, f, 1.0)
        assert rep.holds
        assert rep.lhs == pytest.approx(k_functional(couple.swapped(), f, 1.0), rel=1e-12)

    def test_random_couple(self):
        rng = np.random.default_rng(14)
        couple = random_couple(5, rng)
        rep = symmetry_check(couple, rng.standard_normal(5), 3.0)
        assert rep.holds and rep.ratio <= 1e-9

    def test_zero_element(self):
        couple = couple_from_grams(np.eye(3), np.eye(3))
        rep = symmetry_check(couple, np.zeros(3), 2.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0


class TestInterpolationNorm:
    def test_zero_element(self):
        couple = couple_from_grams(np.eye(3), np.diag([2.0, 3.0, 4.0]))
        for p in (1.0, 2.0, math.inf):
            assert interpolation_norm(couple, np.zeros(3), 0.5, p, "K") == 0.0

    def test_k2_matches_spectral(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            couple = random_couple(5, rng)
            f = rng.standard_normal(5)
            for s in (0.25, 0.5, 0.75):
                got = interpolation_norm(couple, f, s, 2, "K2")
                assert got == pytest.approx(spectral_s_norm(couple, f, s), rel=1e-5)

    @pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
    def test_norm_symmetry(self, p):
        rng = np.random.default_rng(15)
        couple = random_couple(5, rng)
        swapped = couple.swapped()
        f = rng.standard_normal(5)
        for s in (0.25, 0.5, 0.75):
            a = interpolation_norm(couple, f, s, p, "K")
            b = interpolation_norm(swapped, f, 1.0 - s, p, "K")
            assert a == pytest.approx(b, rel=1e-6)

    def test_homogeneity(self):
        rng = np.random.default_rng(16)
        couple = random_couple(6, rng)
        f = rng.standard_normal(6)
        for variant in ("K", "K2"):
            base = interpolation_norm(couple, f, 0.3, 2, variant)
            scaled = interpolation_norm(couple, 7.0 * f, 0.3, 2, variant)
            assert scaled == pytest.approx(7.0 * base, rel=1e-12)

    def test_parameter_domain(self):
        couple = couple_from_grams(np.eye(2), np.eye(2))
        with pytest.raises(ParameterError):
            interpolation_norm(couple, np.ones(2), 0.0, 2)
        with pytest.raises(ParameterError):
            interpolation_norm(couple, np.ones(2), 0.5, 0.5)
        with pytest.raises(ParameterError):
            interpolation_norm(couple, np.ones(2), 0.5, 2, "K3")

    def test_extreme_exponent_corners(self):
        # tiny sp / (1-s)p push the integral mass into the far tails; the
        # saturation-based corrections must still deliver 1e-6 accuracy
        couple = couple_from_grams(np.eye(3), np.diag([1e-8, 1.0, 1e8]))
        f = np.array([1.0, -2.0, 0.5])
        for s, p in ((0.02, 1.0), (0.98, 1.0), (0.02, 7.0)):
            a = interpolation_norm(couple, f, s, p, "K")
            b = interpolation_norm(couple.swapped(), f, 1.0 - s, p, "K")
            assert a == pytest.approx(b, rel=1e-6)
        got = interpolation_norm(couple, f, 0.02, 2, "K2")
        assert got == pytest.approx(spectral_s_norm(couple, f, 0.02), rel=1e-5)

    def test_truncation_guard(self, monkeypatch):
        import mixspec.interpolation as mod
        from mixspec import TruncationError

        # shrink the grid below what the tail budget needs
        monkeypatch.setattr(mod, "_BASE_DECADES", 1.0)
        monkeypatch.setattr(mod, "_TAIL_DESIGN", 1.0)
        couple = couple_from_grams(np.eye(3), np.diag([1.0, 2.0, 3.0]))
        with pytest.raises(TruncationError) as info:
            interpolation_norm(couple, np.ones(3), 0.9, 1, "K2")
        assert info.value.achieved is not None and info.value.achieved > 1e-10


class TestFunctionalHomogeneity:
    def test_k_variants_scale_linearly(self):
        rng = np.random.default_rng(77)
        couple = random_couple(5, rng)
        f = rng.standard_normal(5)
        for x in (0.01, 1.0, 30.0):
            assert k_functional(couple, 4.0 * f, x) == pytest.approx(
                4.0 * k_functional(couple, f, x), rel=1e-12
            )
            assert k2_functional(couple, 4.0 * f, x) == pytest.approx(
                4.0 * k2_functional(couple, f, x), rel=1e-12
            )
        assert spectral_s_norm(couple, 4.0 * f, 0.6) == pytest.approx(
            4.0 * spectral_s_norm(couple, f, 0.6), rel=1e-12
        )


class TestSpectralSNorm:
    def test_constant_modes(self):
        couple = couple_from_grams(np.eye(4), np.eye(4))
        f = np.array([1.0, -2.0, 0.5, 3.0])
        for s in (0.2, 0.5, 0.8):
            expected = math.sqrt(math.pi / (2 * math.sin(math.pi * s))) * couple.norm_x(f)
            assert spectral_s_norm(couple, f, s) == pytest.approx(expected, rel=1e-14)

    def test_single_mode_half(self):
        couple = couple_from_grams(np.array([[1.0]]), np.array([[4.0]]))
        assert spectral_s_norm(couple, [1.0], 0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_hoelder_bound(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            couple = random_couple(6, rng)
            f = rng.standard_normal(6)
            s = float(rng.uniform(0.05, 0.95))
            prefactor = math.sqrt(math.pi / (2 * math.sin(math.pi * s)))
            bound = prefactor * couple.norm_x(f) ** (1 - s) * couple.norm_y(f) ** s
            assert spectral_s_norm(couple, f, s) <= bound * (1 + 1e-12)


class TestOperatorNorm:
    def test_identity(self):
        rng = np.random.default_rng(31)
        g = random_spd(4, rng)
        assert operator_norm(np.eye(4), g, g) == pytest.approx(1.0, rel=1e-12)

    def test_homogeneity(self):
        rng = np.random.default_rng(32)
        g = random_spd(4, rng)
        assert operator_norm(2.0 * np.eye(4), g, g) == pytest.approx(2.0, rel=1e-12)

    def test_power_iteration_oracle(self):
        rng = np.random.default_rng(33)
        for trial in range(10):
            t_mat = rng.standard_normal((5, 5))
            g_dom, g_cod = random_spd(5, rng), random_spd(5, rng)
            fast = operator_norm(t_mat, g_dom, g_cod)
            slow = operator_norm_power_iteration(t_mat, g_dom, g_cod, seed=trial)
            assert fast == pytest.approx(slow, rel=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            operator_norm(np.ones((3, 2)), np.eye(3), np.eye(3))


class TestOperatorInterpolation:
    def test_tight_identity_case(self):
        rng = np.random.default_rng(41)
        couple = random_couple(5, rng)
        rep = check_operator_interpolation(4.0 * np.eye(5), couple, couple, 0.6, 2, "K2")
        assert rep.holds
        assert rep.lhs == pytest.approx(4.0, rel=1e-10)
        assert rep.rhs == pytest.approx(4.0, rel=1e-10)

    def test_diagonal_operator_formula(self):
        mu0 = np.array([1.0, 4.0, 9.0])
        mu1 = np.array([2.0, 3.0, 16.0])
        gains = np.array([1.5, -0.5, 2.0])
        c0 = couple_from_grams(np.eye(3), np.diag(mu0))
        c1 = couple_from_grams(np.eye(3), np.diag(mu1))
        s = 0.4
        rep = check_operator_interpolation(np.diag(gains), c0, c1, s, 2, "K2")
        expected = np.max(np.abs(gains) * (mu1 / mu0) ** (s / 2.0))
        assert rep.lhs == pytest.approx(expected, rel=1e-10)
        assert rep.holds

    def test_random_sweep_quadratic(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            dim = int(rng.integers(2, 11))
            c0, c1 = random_couple(dim, rng), random_couple(dim, rng)
            t_mat = rng.standard_normal((dim, dim))
            s = float(rng.uniform(0.05, 0.95))
            assert check_operator_interpolation(t_mat, c0, c1, s, 2, "K2").holds

    def test_sampled_path(self):
        rng = np.random.default_rng(43)
        c0, c1 = random_couple(4, rng), random_couple(4, rng)
        t_mat = rng.standard_normal((4, 4))
        rep = check_operator_interpolation(
            t_mat, c0, c1, 0.5, math.inf, "K2", num_directions=400, rng=rng
        )
        assert rep.holds
        rep = check_operator_interpolation(
            t_mat, c0, c1, 0.5, 1, "K", num_directions=100, rng=rng
        )
        assert rep.holds

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(44)
        c0, c1 = random_couple(3, rng), random_couple(4, rng)
        with pytest.raises(DimensionError):
            check_operator_interpolation(np.ones((3, 3)), c0, c1, 0.5, 2, "K2")


class TestInterpolationInequality:
    def test_single_mode_exact_ratio(self):
        couple = couple_from_grams(np.eye(3), np.diag([2.0, 5.0, 11.0]))
        for s in (0.25, 0.5, 0.75):
            rep = check_interpolation_inequality(couple, [0.0, 1.0, 0.0], s, 2, "K2")
            assert rep.ratio == pytest.approx(
                math.sqrt(math.pi / (2 * math.sin(math.pi * s))), rel=1e-5
            )

    def test_random_bounded(self):
        rng = np.random.default_rng(51)
        couple = random_couple(20, rng)
        for _ in range(20):
            rep = check_interpolation_inequality(couple, rng.standard_normal(20), 0.5, 2, "K2")
            assert rep.holds
            assert rep.ratio <= math.sqrt(math.pi / 2) + 1e-9

    def test_k_variant_bounded(self):
        rng = np.random.default_rng(52)
        couple = random_couple(6, rng)
        for p in (1.0, 2.0, math.inf):
            rep = check_interpolation_inequality(couple, rng.standard_normal(6), 0.3, p, "K")
            assert rep.holds

    def test_zero_element(self):
        couple = couple_from_grams(np.eye(2), np.eye(2))
        with pytest.raises(UndefinedRatioError):
            check_interpolation_inequality(couple, np.zeros(2), 0.5, 2)


class TestInclusionMonotonicity:
    def test_constant_modes(self):
        couple = couple_from_grams(np.eye(3), np.eye(3))
        f = np.array([1.0, 2.0, -1.0])
        rep = check_inclusion_monotonicity(couple, f, 0.3, 0.7, 2)
        assert rep.holds
        # with all modes at mu = 1 the two norms differ only by the prefactor
        n1 = interpolation_norm(couple, f, 0.3, 2, "K2")
        n2 = interpolation_norm(couple, f, 0.7, 2, "K2")
        expected = math.sqrt(math.sin(math.pi * 0.7) / math.sin(math.pi * 0.3))
        assert n1 / n2 == pytest.approx(expected, rel=1e-6)

    def test_single_mode(self):
        couple = couple_from_grams(np.array([[1.0]]), np.array([[9.0]]))
        rep = check_inclusion_monotonicity(couple, [1.0], 0.2, 0.8, 2)
        assert rep.holds
        assert 9.0**0.2 < 9.0**0.8

    def test_random_sweep(self):
        rng = np.random.default_rng(61)
        for _ in range(300):
            dim = int(rng.integers(1, 8))
            mu = np.exp(rng.uniform(0.0, math.log(100.0), dim))
            couple = couple_from_grams(np.eye(dim), np.diag(mu))
            s1, s2 = np.sort(rng.uniform(0.05, 0.95, 2))
            if s2 - s1 < 1e-6:
                continue
            rep = check_inclusion_monotonicity(couple, rng.standard_normal(dim), s1, s2, 2)
            assert rep.holds

    def test_normalization_error(self):
        couple = couple_from_grams(np.eye(2), np.diag([0.5, 2.0]))
        with pytest.raises(NormalizationError):
            check_inclusion_monotonicity(couple, np.ones(2), 0.3, 0.6, 2)


class TestKCurve:
    def test_curve_invariants(self):
        rng = np.random.default_rng(71)
        couple = random_couple(5, rng)
        f = rng.standard_normal(5)
        xs = np.geomspace(1e-6, 1e6, 64)
        curve = k_curve(couple, f, xs)
        bound = np.minimum(couple.norm_x(f), xs * couple.norm_y(f))
        assert np.all(curve.values <= bound + 1e-10 * np.maximum(bound, 1e-300))

    def test_bad_curve_rejected(self):
        xs = np.array([1.0, 2.0, 3.0])
        with pytest.raises(ParameterError):
            KFunctionalCurve(xs=xs, values=np.array([1.0, 0.5, 0.7]), f_ref=np.ones(2))
        with pytest.raises(ParameterError):
            KFunctionalCurve(xs=xs, values=np.array([1.0, 3.0, 9.5]), f_ref=np.ones(2))

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(72)
        couple = random_couple(4, rng)
        f = rng.standard_normal(4)
        xs = np.geomspace(0.01, 100.0, 7)
        vals = k_functional_samples(couple, f, xs)
        for x, v in zip(xs, vals):
            assert v == pytest.approx(k_functional(couple, f, float(x)), rel=1e-12)
