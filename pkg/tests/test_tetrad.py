import numpy as np
import pytest

from singwald.classify import classify
from singwald.errors import ParseError
from singwald.gaussian import make_generator, validate_covariance
from singwald.laws import FoldedBetaProduct, chi2_sf, tetrad_singular_cdf
from singwald.poly import HomogeneousPolynomial
from singwald.tetrad import (
    DataMatrix,
    TetradIndex,
    all_tetrads,
    asymptotic_v_normal,
    empirical_covariance,
    parse_data_csv,
    tetrad_stat,
    wald_tetrad_test,
)

IDX = TetradIndex(0, 1, 2, 3)


def simulate(theta, n, seed):
    chol = np.linalg.cholesky(theta)
    x = make_generator(seed, 0).standard_normal((n, theta.shape[0])) @ chol.T
    return DataMatrix(values=x)


class TestEmpiricalCovariance:
    def test_two_points_by_hand(self):
        got = empirical_covariance(np.array([[0.0, 0.0], [2.0, 2.0]]))
        np.testing.assert_array_equal(got, [[1.0, 1.0], [1.0, 1.0]])

    def test_constant_column_zeroes_out(self):
        data = np.column_stack([np.ones(10), np.arange(10.0)])
        got = empirical_covariance(data)
        assert got[0, 0] == 0.0 and got[0, 1] == 0.0

    def test_divisor_is_n(self):
        data = np.array([[0.0], [1.0]])
        # centered values +-1/2, so variance is 1/4 with divisor n=2
        assert empirical_covariance(data)[0, 0] == pytest.approx(0.25)

    def test_consistency(self):
        theta = np.array(
            [[1.0, 0.3, 0.0, 0.1], [0.3, 2.0, 0.2, 0.0],
             [0.0, 0.2, 1.5, -0.4], [0.1, 0.0, -0.4, 1.0]]
        )
        data = simulate(theta, 10**6, 30)
        assert np.abs(empirical_covariance(data) - theta).max() < 0.01

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            empirical_covariance(np.array([[1.0, np.inf], [0.0, 1.0]]))


class TestTetradStat:
    def test_unit_cross_pattern(self):
        theta = np.eye(4)
        theta[0, 2] = theta[2, 0] = 1.0
        theta[1, 3] = theta[3, 1] = 1.0
        gamma, grad = tetrad_stat(theta, IDX)
        assert gamma == 1.0
        np.testing.assert_array_equal(grad, [1.0, 0.0, 0.0, 1.0])

    def test_rank_one_pattern_vanishes_everywhere(self):
        # factor structure theta_ij = b_i b_j kills every tetrad
        b = np.array([0.8, -0.5, 1.2, 0.3, 0.7])
        theta = np.outer(b, b) + np.diag(np.full(5, 0.5))
        for idx in all_tetrads(5):
            gamma, _ = tetrad_stat(theta, idx)
            assert gamma == pytest.approx(0.0, abs=1e-14)

    def test_block_diagonal_is_doubly_singular(self):
        theta = np.eye(4)
        theta[0, 1] = theta[1, 0] = 0.5
        theta[2, 3] = theta[3, 2] = -0.3
        gamma, grad = tetrad_stat(theta, IDX)
        assert gamma == 0.0
        np.testing.assert_array_equal(grad, np.zeros(4))

    def test_gradient_matches_polynomial(self):
        # same ordering as the quadratic form on (t_ik, t_il, t_jk, t_jl)
        f = HomogeneousPolynomial.from_terms(
            [(1.0, (1, 0, 0, 1)), (-1.0, (0, 1, 1, 0))]
        )
        rng = np.random.default_rng(31)
        theta = rng.standard_normal((4, 4))
        theta = (theta + theta.T) / 2
        gamma, grad = tetrad_stat(theta, IDX)
        coords = np.array([theta[0, 2], theta[0, 3], theta[1, 2], theta[1, 3]])
        assert gamma == pytest.approx(f.evaluate(coords))
        np.testing.assert_allclose(grad, f.gradient(coords))

    def test_distinct_indices_required(self):
        with pytest.raises(ValueError, match="distinct"):
            TetradIndex(0, 1, 2, 2)


class TestAsymptoticVariance:
    def test_identity_theta(self):
        v = asymptotic_v_normal(np.eye(4), IDX.pairs)
        np.testing.assert_array_equal(v, np.eye(4))

    def test_block_diagonal_kronecker_structure(self):
        b1 = np.array([[1.0, 0.4], [0.4, 2.0]])
        b2 = np.array([[1.5, -0.2], [-0.2, 1.0]])
        theta = np.block(
            [[b1, np.zeros((2, 2))], [np.zeros((2, 2)), b2]]
        )
        v = asymptotic_v_normal(theta, IDX.pairs)
        np.testing.assert_allclose(v, np.kron(b1, b2), atol=1e-14)

    def test_diagonal_pair_gives_double_square(self):
        theta = np.diag([2.0, 3.0])
        v = asymptotic_v_normal(theta, [(0, 0)])
        assert v[0, 0] == pytest.approx(2.0 * 4.0)

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            asymptotic_v_normal(np.array([[1.0, 1.0], [0.0, 1.0]]), [(0, 1)])


class TestWaldTetradTest:
    def test_scale_invariance_of_statistic(self):
        theta = np.eye(4)
        theta[0, 2] = theta[2, 0] = 0.3
        data = simulate(theta, 2000, 32)
        base = wald_tetrad_test(data, IDX)
        scaled = DataMatrix(values=data.values * np.array([1.0, 3.0, 0.25, 7.0]))
        moved = wald_tetrad_test(scaled, IDX)
        assert moved.t_stat == pytest.approx(base.t_stat, rel=1e-8)

    def test_pvalues_consistent_with_cdf(self):
        theta = np.eye(4)
        data = simulate(theta, 3000, 33)
        rep = wald_tetrad_test(data, IDX)
        assert rep.p_regular == pytest.approx(float(chi2_sf(rep.t_stat, 1)))
        assert rep.p_singular == pytest.approx(
            1.0 - tetrad_singular_cdf(rep.t_stat)
        )
        assert 0.0 <= rep.p_regular <= 1.0 and 0.0 <= rep.p_singular <= 1.0

    def test_regular_point_hinted_regular(self):
        theta = np.eye(4)
        theta[0, 2] = theta[2, 0] = 0.6
        data = simulate(theta, 5000, 34)
        assert wald_tetrad_test(data, IDX).regime_hint == "regular"

    def test_singular_point_hinted_near_singular(self):
        data = simulate(np.eye(4), 5000, 35)
        assert wald_tetrad_test(data, IDX).regime_hint == "near_singular"

    def test_power_against_fixed_alternative(self):
        theta = np.eye(4)
        theta[0, 2] = theta[2, 0] = 0.5
        theta[1, 3] = theta[3, 1] = 0.5
        # gamma = 0.25 != 0: n = 5000 should reject overwhelmingly
        data = simulate(theta, 5000, 36)
        rep = wald_tetrad_test(data, IDX)
        assert rep.p_regular < 1e-6

    def test_degenerate_data_advises_more(self):
        # constant third and fourth columns zero out the gradient and the
        # variance submatrix exactly
        rng = np.random.default_rng(55)
        values = np.column_stack(
            [rng.standard_normal(10), rng.standard_normal(10), np.ones(10), np.ones(10)]
        )
        with pytest.raises(ValueError, match="more data"):
            wald_tetrad_test(DataMatrix(values=values), IDX)

    def test_out_of_range_indices(self):
        data = simulate(np.eye(4), 100, 37)
        with pytest.raises(ValueError, match="out of range"):
            wald_tetrad_test(data, TetradIndex(0, 1, 2, 7))


class TestCalibration:
    def test_regular_null_keeps_level(self):
        # one-factor structure with nonzero loadings: gamma = 0, gradient
        # nonzero, so the chi-square-1 reference applies
        from scipy import stats as sps

        from singwald.verify import _simulate_tetrad_stats

        b = np.array([0.9, 0.8, 0.7, 0.6])
        theta = np.outer(b, b) + np.diag([0.5, 0.6, 0.7, 0.8])
        t = _simulate_tetrad_stats(theta, 5000, 2000, 39)
        c05 = sps.chi2.ppf(0.95, 1)
        rate = float((t > c05).mean())
        assert 0.035 <= rate <= 0.065

    def test_power_grows_to_one(self):
        # gamma = 0.25 under the alternative; the rejection rate at n = 5000
        # must exceed 0.99
        from scipy import stats as sps

        from singwald.verify import _simulate_tetrad_stats

        theta = np.eye(4)
        theta[0, 2] = theta[2, 0] = 0.5
        theta[1, 3] = theta[3, 1] = 0.5
        t = _simulate_tetrad_stats(theta, 5000, 500, 7)
        rate = float((t > sps.chi2.ppf(0.95, 1)).mean())
        assert rate > 0.99

    def test_singular_null_is_conservative(self):
        theta = np.block(
            [
                [np.array([[1.0, 0.7], [0.7, 1.0]]), np.zeros((2, 2))],
                [np.zeros((2, 2)), np.eye(2)],
            ]
        )
        from singwald.verify import _simulate_tetrad_stats
        from scipy import stats as sps

        t = _simulate_tetrad_stats(theta, 2000, 2000, 40)
        c05 = sps.chi2.ppf(0.95, 1)
        assert float((t > c05).mean()) <= 0.01


class TestSingularLimitLaw:
    def test_block_diagonal_classifies_as_tetrad_law(self):
        # the limit of the Wald statistic at a block-diagonal truth is the
        # tetrad singular law for every positive definite block pair
        f = HomogeneousPolynomial.from_terms(
            [(1.0, (1, 0, 0, 1)), (-1.0, (0, 1, 1, 0))]
        )
        rng = np.random.default_rng(41)
        for _ in range(10):
            v = rng.uniform(0.3, 3.0, 4)
            r1, r2 = rng.uniform(-0.9, 0.9, 2)
            b1 = np.array(
                [[v[0], r1 * np.sqrt(v[0] * v[1])], [r1 * np.sqrt(v[0] * v[1]), v[1]]]
            )
            b2 = np.array(
                [[v[2], r2 * np.sqrt(v[2] * v[3])], [r2 * np.sqrt(v[2] * v[3]), v[3]]]
            )
            theta = np.block([[b1, np.zeros((2, 2))], [np.zeros((2, 2)), b2]])
            sigma_c = asymptotic_v_normal(theta, IDX.pairs)
            cls = classify(f.to_quadratic_form(), validate_covariance(sigma_c))
            assert cls.law == FoldedBetaProduct(2, 2)

    def test_cdf_dominance_of_singular_law(self):
        # the singular CDF sits above chi-square-1 pointwise on [0, 50]
        t = np.linspace(0.0, 50.0, 2001)
        gap = chi2_sf(t, 1) - (1.0 - tetrad_singular_cdf(t))
        assert gap.min() >= -1e-9


class TestDataMatrix:
    def test_needs_four_columns(self):
        with pytest.raises(ValueError, match="4 columns"):
            DataMatrix(values=np.zeros((10, 3)))

    def test_needs_enough_rows(self):
        with pytest.raises(ValueError, match="rows"):
            DataMatrix(values=np.zeros((4, 4)))

    def test_rejects_nan(self):
        values = np.zeros((6, 4))
        values[2, 2] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            DataMatrix(values=values)


class TestCsvLoading:
    def test_header_detected(self):
        text = "a,b,c,d\n" + "\n".join(
            ",".join(str(float(i + j)) for j in range(4)) for i in range(6)
        )
        data = parse_data_csv(text)
        assert data.columns == ("a", "b", "c", "d")
        assert data.n == 6

    def test_no_header(self):
        text = "\n".join("1,2,3,4" for _ in range(6))
        data = parse_data_csv(text + "\n")
        assert data.columns is None

    def test_ragged_row_line_number(self):
        text = "1,2,3,4\n1,2,3\n"
        with pytest.raises(ParseError, match=r"<input>:2"):
            parse_data_csv(text)

    def test_bad_cell(self):
        rows = ["1,2,3,4"] * 6
        rows[3] = "1,2,x,4"
        with pytest.raises(ParseError, match=r"<input>:4"):
            parse_data_csv("\n".join(rows))

    def test_empty(self):
        with pytest.raises(ParseError, match="no data"):
            parse_data_csv("")


def test_all_tetrads_enumeration():
    idx = list(all_tetrads(4))
    assert len(idx) == 3  # one 4-subset, three pairings
    assert len(list(all_tetrads(5))) == 15
    # pairings of {0,1,2,3}: (01|23), (02|13), (03|12)
    assert {(t.i, t.j, t.k, t.l) for t in idx} == {
        (0, 1, 2, 3),
        (0, 2, 1, 3),
        (0, 3, 1, 2),
    }
