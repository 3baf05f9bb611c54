import numpy as np
import pytest

from diracmech import Chart, EvaluationError, Section, SkewAlgebroid, StructureError, basis_sections
from diracmech import fd
from diracmech.systems import rolling_disc_algebroid, so3_algebroid

from conftest import make_random_pigraph, smooth_section


def identity_algebroid(n):
    chart = Chart(n, n)
    return SkewAlgebroid(chart, lambda x: np.eye(n), lambda x: np.zeros((n, n, n)))


class TestAnchor:
    def test_rolling_disc_projects_first_fiber_direction(self, disc):
        for phi in (0.0, 1.3, -2.2):
            assert np.array_equal(disc.anchor(np.array([phi])), [[1.0, 0.0, 0.0, 0.0]])

    def test_identity_anchor(self):
        assert np.array_equal(identity_algebroid(3).anchor(np.zeros(3)), np.eye(3))

    def test_point_base_gives_empty_matrix(self, so3):
        assert so3.anchor(np.zeros(0)).shape == (0, 3)

    def test_nonfinite_anchor_reports_index(self):
        chart = Chart(1, 2)
        bad = SkewAlgebroid(chart, lambda x: np.array([[np.nan, 1.0]]),
                            lambda x: np.zeros((2, 2, 2)))
        with pytest.raises(EvaluationError, match=r"\(0, 0\)"):
            bad.anchor(np.zeros(1))

    def test_nonfinite_base_point_rejected(self, disc):
        with pytest.raises(EvaluationError):
            disc.anchor(np.array([np.inf]))


class TestStructure:
    def test_rolling_disc_entries(self, disc):
        phi = 0.9
        c = disc.structure(np.array([phi]))
        expected = np.zeros((4, 4, 4))
        expected[0, 1, 3] = np.cos(phi)
        expected[0, 1, 2] = -np.sin(phi)
        expected[1, 0, 3] = -np.cos(phi)
        expected[1, 0, 2] = np.sin(phi)
        assert np.allclose(c, expected, atol=0)

    def test_canonical_structure_vanishes(self):
        assert not identity_algebroid(2).structure(np.zeros(2)).any()

    def test_so3_matches_cross_product_table(self, so3):
        # brute-force oracle: [e_i, e_j] must equal the cross product e_i x e_j
        c = so3.structure(np.zeros(0))
        eye = np.eye(3)
        for i in range(3):
            for j in range(3):
                assert np.allclose(c[i, j], np.cross(eye[i], eye[j]), atol=0)

    def test_antisymmetry_is_exact(self, disc):
        rng = np.random.default_rng(0)
        for _ in range(10):
            c = disc.structure(rng.standard_normal(1))
            assert np.array_equal(c, -np.swapaxes(c, 0, 1))

    def test_user_structure_must_be_antisymmetric(self):
        chart = Chart(0, 2)
        c = np.zeros((2, 2, 2))
        c[0, 1, 0] = 1.0  # missing the antisymmetric partner
        bad = SkewAlgebroid(chart, lambda x: np.zeros((0, 2)), lambda x, c=c: c)
        with pytest.raises(StructureError, match="antisymmetric"):
            bad.structure(np.zeros(0))


class TestBracket:
    def test_rolling_disc_basis_bracket(self, disc):
        e = basis_sections(disc.chart)
        out = disc.bracket(e[0], e[1], np.array([0.0]))
        assert np.allclose(out, [0.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_bracket_with_itself_vanishes(self, disc):
        X = smooth_section(3, 4, 1)
        assert np.allclose(disc.bracket(X, X, np.array([0.4])), 0.0, atol=1e-12)

    def test_so3_reproduces_cross_product(self, so3):
        e = basis_sections(so3.chart)
        x = np.zeros(0)
        eye = np.eye(3)
        for i in range(3):
            for j in range(3):
                out = so3.bracket(e[i], e[j], x)
                assert np.allclose(out, np.cross(eye[i], eye[j]), atol=1e-12)

    def test_antisymmetry_on_random_sections(self):
        alg = make_random_pigraph(seed=9)
        rng = np.random.default_rng(1)
        X = smooth_section(10, 3, 2)
        Y = smooth_section(11, 3, 2)
        for _ in range(10):
            x = rng.standard_normal(2)
            lhs = alg.bracket(X, Y, x) + alg.bracket(Y, X, x)
            assert np.max(np.abs(lhs)) <= 1e-10

    def test_leibniz_rule(self):
        alg = make_random_pigraph(seed=5)
        rng = np.random.default_rng(2)
        X = smooth_section(20, 3, 2)
        Y = smooth_section(21, 3, 2)

        def f(x):
            return float(np.sin(x[0]) + 0.5 * x[1] ** 2)

        def fY(x):
            return f(x) * Y(x)

        fy_section = Section(fY, name="fY")
        for _ in range(10):
            x = rng.standard_normal(2)
            lhs = alg.bracket(X, fy_section, x)
            anchor_term = float(alg.anchor(x) @ X(x) @ fd.gradient(f, x))
            rhs = f(x) * alg.bracket(X, Y, x) + anchor_term * Y(x)
            assert np.max(np.abs(lhs - rhs)) <= 1e-6

    def test_poisson_bracket_characterization(self):
        # independent oracle for the coordinate bracket formula: the bracket of
        # the fiber-linear functions of X and Y under the linear bivector must
        # be the fiber-linear function of [X, Y]
        alg = make_random_pigraph(seed=5)
        n, m = 2, 3
        X = smooth_section(30, m, n)
        Y = smooth_section(31, m, n)
        rng = np.random.default_rng(3)

        def linear_fn(section):
            def f(z):
                return float(section(z[:n]) @ z[n:])
            return f

        fX, fY = linear_fn(X), linear_fn(Y)
        for _ in range(10):
            x = rng.standard_normal(n)
            xi = rng.standard_normal(m)
            z = np.concatenate([x, xi])
            P = alg.linear_bivector(x, xi)
            gX = fd.gradient(fX, z)
            gY = fd.gradient(fY, z)
            numeric = float(gX @ P @ gY)
            coordinate = float(alg.bracket(X, Y, x) @ xi)
            assert abs(numeric - coordinate) <= 1e-6 * (1.0 + abs(coordinate))


class TestJacobiator:
    def test_canonical_constant_sections(self):
        alg = identity_algebroid(2)
        e = basis_sections(alg.chart)
        out = alg.jacobiator(e[0], e[1], e[0], np.zeros(2))
        assert np.allclose(out, 0.0, atol=1e-12)

    def test_rolling_disc_is_lie_on_probes(self, disc):
        e = basis_sections(disc.chart)
        rng = np.random.default_rng(4)
        worst = 0.0
        for _ in range(100):
            x = rng.standard_normal(1)
            for (i, j, k) in ((0, 1, 2), (0, 1, 3), (1, 2, 3), (0, 2, 3)):
                out = disc.jacobiator(e[i], e[j], e[k], x)
                worst = max(worst, float(np.max(np.abs(out))))
        assert worst <= 1e-6

    def test_so3_jacobi_identity(self, so3):
        e = basis_sections(so3.chart)
        out = so3.jacobiator(e[0], e[1], e[2], np.zeros(0))
        assert np.max(np.abs(out)) <= 1e-12


class TestLinearBivector:
    def test_rolling_disc_slot(self, disc):
        P = disc.linear_bivector(np.array([0.0]), np.array([0.0, 0.0, 0.0, 1.0]))
        assert P.shape == (5, 5)
        assert np.isclose(P[1, 2], 1.0)  # dual-fiber block, (1,2) entry = R cos phi
        assert np.isclose(P[1, 0], 1.0)  # dual/base block carries the anchor
        assert np.allclose(P, -P.T, atol=0)

    def test_zero_data_gives_zero_matrix(self):
        chart = Chart(1, 2)
        alg = SkewAlgebroid(chart, lambda x: np.zeros((1, 2)),
                            lambda x: np.zeros((2, 2, 2)))
        P = alg.linear_bivector(np.zeros(1), np.zeros(2))
        assert not P.any()

    def test_canonical_block_form(self):
        # with vanishing structure and identity anchor the matrix is the
        # constant inverse-symplectic block form
        alg = identity_algebroid(2)
        P = alg.linear_bivector(np.zeros(2), np.ones(2))
        expected = np.block([[np.zeros((2, 2)), -np.eye(2)],
                             [np.eye(2), np.zeros((2, 2))]])
        assert np.allclose(P, expected, atol=0)

    def test_homogeneity_in_dual_fiber(self):
        alg = make_random_pigraph(seed=8)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(2)
        xi = rng.standard_normal(3)
        P1 = alg.linear_bivector(x, xi)
        P2 = alg.linear_bivector(x, 2.0 * xi)
        assert np.allclose(P2[2:, 2:], 2.0 * P1[2:, 2:], atol=1e-12)
        assert np.allclose(P2[:2, 2:], P1[:2, 2:], atol=0)
        assert np.allclose(P2, -P2.T, atol=0)


class TestSection:
    def test_analytic_jacobian_checked_against_differences(self):
        good = smooth_section(1, 3, 2)
        good.check_jacobian([np.zeros(2), np.ones(2)])
        bad = Section(lambda x: np.array([x[0] ** 2, x[1]]),
                      jacobian=lambda x: np.array([[1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(StructureError):
            bad.check_jacobian([np.array([3.0, 0.0])])
