"""Basis, quadrature, transform and observable tests."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resonant1d.hermite import (
    GridCoverageError,
    HermiteState,
    QuadratureError,
    analyze,
    basis_state,
    build_grid,
    compensated_gauss_hermite,
    derivative_coeffs,
    gauss_hermite_rule,
    hermite_eval,
    hermite_table,
    hs_norm,
    inner,
    load_state,
    make_grid,
    mass,
    observables,
    observables_grid,
    position_coeffs,
    project_function,
    save_state,
    synthesize,
)

SQRT_PI = math.sqrt(math.pi)


def random_coeffs(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


# ---------------------------------------------------------------------------
# quadrature rule
# ---------------------------------------------------------------------------


class TestGaussHermiteRule:
    def test_single_point(self):
        nodes, weights = gauss_hermite_rule(1)
        assert nodes.tolist() == [0.0]
        assert abs(weights[0] - SQRT_PI) < 1e-14

    def test_two_points(self):
        nodes, weights = gauss_hermite_rule(2)
        assert np.allclose(nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-12)
        assert np.allclose(weights, [SQRT_PI / 2, SQRT_PI / 2], atol=1e-13)

    @pytest.mark.parametrize("q", [3, 7, 16, 33, 64, 128, 190])
    def test_total_mass(self, q):
        _, weights = gauss_hermite_rule(q)
        assert abs(weights.sum() - SQRT_PI) < 1e-13

    @pytest.mark.parametrize("q", [2, 9, 40, 101])
    def test_exact_symmetry(self, q):
        nodes, weights = gauss_hermite_rule(q)
        assert np.array_equal(nodes, -nodes[::-1])
        assert np.array_equal(weights, weights[::-1])

    @pytest.mark.parametrize("q", [2, 8, 32, 64, 150])
    def test_against_numpy_oracle(self, q):
        nodes, weights = gauss_hermite_rule(q)
        ref_nodes, ref_weights = np.polynomial.hermite.hermgauss(q)
        assert np.max(np.abs(nodes - ref_nodes)) < 1e-13
        assert np.max(np.abs(weights - ref_weights) / np.maximum(ref_weights, 1e-300)) < 1e-12

    def test_zero_points_rejected(self):
        with pytest.raises(QuadratureError):
            gauss_hermite_rule(0)

    @pytest.mark.parametrize("q", [5, 20, 61])
    def test_polynomial_exactness(self, q):
        # exact for even monomials up to degree 2Q-2 (odd ones vanish by symmetry)
        nodes, weights = gauss_hermite_rule(q)
        for d in range(0, 2 * q - 1, max(2, (q // 3) * 2)):
            got = float(weights @ nodes**d)
            want = math.gamma((d + 1) / 2.0) if d % 2 == 0 else 0.0
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))

    def test_compensated_form_matches(self):
        nodes, weights = gauss_hermite_rule(48)
        cn, cw = compensated_gauss_hermite(48)
        assert np.array_equal(nodes, cn)
        assert np.allclose(weights, cw * np.exp(-cn * cn), rtol=1e-13, atol=0)


# ---------------------------------------------------------------------------
# hermite functions
# ---------------------------------------------------------------------------


class TestHermiteEval:
    def test_ground_state_at_origin(self):
        assert abs(hermite_eval(0, 0.0) - math.pi ** (-0.25)) < 1e-15
        assert abs(float(hermite_eval(0, 0.0)) - 0.75112554) < 1e-8

    def test_first_mode_odd(self):
        assert float(hermite_eval(1, 0.0)) == 0.0

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=0, max_value=64),
        x=st.floats(min_value=-8.0, max_value=8.0, allow_nan=False),
    )
    def test_parity_bit_exact(self, n, x):
        left = float(hermite_eval(n, -x))
        right = (-1.0) ** n * float(hermite_eval(n, x))
        assert left == right

    @pytest.mark.parametrize("m,n", [(0, 0), (3, 3), (5, 2), (17, 17), (20, 11)])
    def test_quadrature_orthonormality(self, m, n):
        q = max(m, n) + 1
        grid = make_grid(max(m, n) + 1, q, 1.0)
        val = float(
            np.sum(grid.comp_weights * grid.basis_vals[m] * grid.basis_vals[n])
        )
        assert abs(val - (1.0 if m == n else 0.0)) < 1e-12

    def test_table_matches_single_eval(self):
        x = np.linspace(-5, 5, 11)
        table = hermite_table(10, x)
        for n in (0, 4, 10):
            assert np.array_equal(table[n], hermite_eval(n, x))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


class TestHermiteState:
    def test_auto_padding_add(self):
        a = HermiteState(np.array([1.0, 2.0]))
        b = HermiteState(np.array([1.0j, 0.0, 3.0]))
        c = a + b
        assert c.n_modes == 3
        assert np.allclose(c.coeffs, [1 + 1j, 2, 3])

    def test_truncation_is_explicit(self):
        a = HermiteState(np.arange(1.0, 6.0))
        assert a.truncated(2).coeffs.tolist() == [1.0, 2.0]
        # padding never truncates
        assert a.padded(2).n_modes == 5

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            HermiteState(np.array([1.0, np.nan]))

    def test_mass_and_norms(self):
        for n in (0, 3, 9):
            phi = basis_state(n)
            assert abs(mass(phi) - 1.0) < 1e-15
            for s in (0.0, 0.5, 2.0):
                assert abs(hs_norm(phi, s) - (2 * n + 1) ** (s / 2.0)) < 1e-12

    def test_hs0_is_sqrt_mass(self):
        f = HermiteState(random_coeffs(12, 5))
        assert abs(hs_norm(f, 0.0) - math.sqrt(mass(f))) < 1e-13

    def test_inner_matches_integral(self):
        f = HermiteState(random_coeffs(6, 1))
        g = HermiteState(random_coeffs(6, 2))
        grid = make_grid(6, 12, 1.0)
        quad = np.sum(
            grid.comp_weights * synthesize(f, grid) * np.conj(synthesize(g, grid))
        )
        assert abs(inner(f, g) - quad) < 1e-12


# ---------------------------------------------------------------------------
# grids and transforms
# ---------------------------------------------------------------------------


class TestGrids:
    def test_build_grid_quintic(self):
        grid = build_grid(4, 2)
        assert grid.scale == pytest.approx(math.sqrt(3.0), abs=0)
        assert grid.q_nodes == 10

    def test_build_grid_cubic(self):
        grid = build_grid(4, 1)
        assert grid.scale == pytest.approx(math.sqrt(2.0), abs=0)
        assert grid.q_nodes == 7

    @pytest.mark.parametrize("k", [1, 2])
    def test_arity_product_projection_exact(self, k):
        # the grid's contract: projections of (2k+1)-fold products onto the
        # basis integrate exactly at the minimal node count
        from scipy.integrate import quad

        from resonant1d.propagators import evaluate_at

        n = 5
        rng = np.random.default_rng(8)
        states = [HermiteState(random_coeffs(n, seed)) for seed in rng.integers(0, 99, 2 * k + 1)]
        grid = build_grid(n, k)
        vals = [synthesize(s, grid) for s in states]
        prod = np.prod(vals[: k + 1], axis=0) * np.prod([np.conj(v) for v in vals[k + 1 :]], axis=0)
        got = analyze(prod, grid).coeffs

        # same-scale oversampled grid: exactness means no change with Q
        big = make_grid(n, 4 * grid.q_nodes, grid.scale)
        vals_big = [synthesize(s, big) for s in states]
        prod_big = np.prod(vals_big[: k + 1], axis=0) * np.prod(
            [np.conj(v) for v in vals_big[k + 1 :]], axis=0
        )
        want = big.weighted_basis @ prod_big
        assert np.max(np.abs(got - want)) < 1e-13

        # independent adaptive-quadrature oracle for two coefficients
        def integrand(x, m, part):
            fx = np.prod([evaluate_at(s, np.array([x]))[0] for s in states[: k + 1]])
            fx *= np.prod(
                [np.conj(evaluate_at(s, np.array([x]))[0]) for s in states[k + 1 :]]
            )
            fx *= float(hermite_eval(m, x))
            return fx.real if part == "re" else fx.imag

        for m in (0, 3):
            re = quad(integrand, -12, 12, args=(m, "re"), limit=200)[0]
            im = quad(integrand, -12, 12, args=(m, "im"), limit=200)[0]
            assert abs(got[m] - (re + 1j * im)) < 1e-10

    @pytest.mark.parametrize("scale", [1.0, math.sqrt(2.0), math.sqrt(3.0)])
    def test_moment_exactness(self, scale):
        # sum W x^{2d} e^{-scale^2 x^2} = Gamma(d+1/2)/scale^{2d+1}
        q = 30
        grid = make_grid(2, q, scale)
        for d in (0, 3, 11, 29):
            got = float(np.sum(grid.comp_weights * grid.nodes ** (2 * d) * np.exp(-(scale**2) * grid.nodes**2)))
            want = math.gamma(d + 0.5) / scale ** (2 * d + 1)
            assert abs(got - want) / want < 1e-12


class TestTransforms:
    def test_unit_mode_round_trip(self):
        grid = make_grid(4, 8, 1.0)
        e2 = basis_state(2, 4)
        back = analyze(synthesize(e2, grid), grid, 4)
        assert np.max(np.abs(back.coeffs - e2.coeffs)) < 1e-12

    def test_zero_round_trip(self):
        grid = make_grid(4, 8, 1.0)
        zero = HermiteState(np.zeros(4, dtype=complex))
        vals = synthesize(zero, grid)
        assert np.all(vals == 0)
        assert np.all(analyze(vals, grid).coeffs == 0)

    def test_random_round_trip_n16(self):
        f = HermiteState(random_coeffs(16, 3))
        grid = make_grid(16, 16, 1.0)
        back = analyze(synthesize(f, grid), grid, 16)
        assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-11

    @pytest.mark.parametrize("n", [2, 8, 32])
    def test_round_trip_identity_unit_grids(self, n):
        f = HermiteState(random_coeffs(n, n))
        grid = make_grid(n, n, 1.0)
        back = analyze(synthesize(f, grid), grid, n)
        assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-11

    def test_dimension_mismatch(self):
        grid = make_grid(4, 8, 1.0)
        with pytest.raises(ValueError):
            synthesize(HermiteState(np.ones(9)), grid)
        with pytest.raises(ValueError):
            analyze(np.ones(5), grid)

    def test_project_function_gaussian(self):
        # exp(-x^2) has only even-mode content decaying by 1/3 per mode pair,
        # so 44 modes reach ~1e-10 truncation
        g = project_function(lambda x: np.exp(-(x**2)), 44)
        assert np.max(np.abs(g.coeffs[1::2])) < 1e-14
        even = np.abs(g.coeffs[0::2])
        ratios = even[1:16] / even[:15]
        # |c_{2m+2}/c_{2m}| = sqrt((2m+1)/(2m+2))/3 climbs toward 1/3
        assert np.all(np.diff(ratios) > 0) and ratios[-1] < 1.0 / 3.0
        predicted = np.sqrt((2 * np.arange(1, 16) - 1) / (2 * np.arange(1, 16))) / 3.0
        assert np.allclose(ratios, predicted, rtol=1e-6)
        grid = make_grid(44, 88, 1.0)
        vals = synthesize(g, grid)
        assert np.max(np.abs(vals - np.exp(-grid.nodes**2))) < 1e-9


# ---------------------------------------------------------------------------
# coefficient-space operators and observables
# ---------------------------------------------------------------------------


class TestObservables:
    def test_derivative_against_quadrature(self):
        f = HermiteState(random_coeffs(7, 11))
        grid = make_grid(8, 20, 1.0)
        df = synthesize(derivative_coeffs(f), grid)
        x = grid.nodes
        # compare with an independent finite-difference derivative
        h = 1e-5
        table_p = hermite_table(6, x + h)
        table_m = hermite_table(6, x - h)
        fd = (f.coeffs @ table_p - f.coeffs @ table_m) / (2 * h)
        assert np.max(np.abs(df - fd)) < 1e-8

    def test_position_operator(self):
        f = HermiteState(random_coeffs(7, 12))
        grid = make_grid(8, 20, 1.0)
        xf = synthesize(position_coeffs(f), grid)
        assert np.max(np.abs(xf - grid.nodes * synthesize(f, grid))) < 1e-12

    def test_ground_state_record(self):
        rec = observables(basis_state(0))
        assert abs(rec["mass"] - 1.0) < 1e-13
        assert abs(rec["x_mean"]) < 1e-13
        assert abs(rec["momentum"]) < 1e-13
        assert abs(rec["energy"] - 1.0) < 1e-12

    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_eigenmode_energy(self, n):
        rec = observables(basis_state(n))
        assert abs(rec["energy"] - (2 * n + 1)) < 1e-11

    def test_translated_gaussian_x_mean(self):
        a = 0.5
        shifted = project_function(lambda x: math.pi ** (-0.25) * np.exp(-0.5 * (x - a) ** 2), 24)
        rec = observables(shifted)
        assert abs(rec["x_mean"] - a) < 1e-10

    def test_energy_quadrature_vs_coefficients(self):
        f = HermiteState(random_coeffs(14, 9))
        rec = observables(f)
        n = np.arange(14)
        coeff_energy = float(np.sum((2 * n + 1) * np.abs(f.coeffs) ** 2))
        assert abs(rec["energy"] - coeff_energy) / coeff_energy < 1e-10

    def test_grid_too_small_raises(self):
        f = HermiteState(random_coeffs(10, 2))
        with pytest.raises(GridCoverageError):
            observables(f, make_grid(11, 6, 1.0))
        with pytest.raises(GridCoverageError):
            observables(f, build_grid(12, 1))  # wrong scale

    def test_observables_grid_shape(self):
        grid = observables_grid(10)
        assert grid.q_nodes == 12
        assert grid.n_basis == 11


# ---------------------------------------------------------------------------
# state files
# ---------------------------------------------------------------------------


class TestStateFiles:
    def test_round_trip(self, tmp_path):
        f = HermiteState(random_coeffs(5, 21))
        path = tmp_path / "state.json"
        save_state(f, path)
        g = load_state(path)
        assert g.n_modes == 5
        assert np.array_equal(g.coeffs, f.coeffs)

    def test_schema(self, tmp_path):
        path = tmp_path / "state.json"
        save_state(basis_state(1, 2), path)
        payload = json.loads(path.read_text())
        assert payload == {"n_modes": 2, "coeffs": [[0.0, 0.0], [1.0, 0.0]]}

    def test_inconsistent_header_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_modes": 3, "coeffs": [[1.0, 0.0]]}))
        with pytest.raises(ValueError):
            load_state(path)
