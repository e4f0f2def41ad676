import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from qzeros import racahspec
from qzeros.errors import BranchDegenerate
from qzeros.numlin import compute_zero_set, determinant, eigenvalues, match_spectra
from qzeros.polyform import RacahParams, racah_eval
from qzeros.sweeps import SplitMix64, draw_racah_params

ANCHOR = RacahParams(alpha=3, beta=2, gamma=4, delta=5, q=0.5, N=1)


def random_instance(seed, q, n):
    p = draw_racah_params(SplitMix64(seed), q, n)
    return p, compute_zero_set(p)


class TestShiftTargets:
    def test_gamma_delta_zero_limit(self):
        z_plus, z_minus = racahspec.shift_targets(0.5, 0.0, 1.0)
        assert z_plus == pytest.approx(0.5)
        assert z_minus == pytest.approx(2.0)

    def test_vanishing_discriminant_collapse(self):
        # z^2 = 4*gamma*delta*q makes both images (1+q^2)/(2q) z
        q, gd = 0.5, 0.3
        z = 2 * np.sqrt(gd * q)
        z_plus, z_minus = racahspec.shift_targets(q, gd, z)
        assert z_plus == pytest.approx((1 + q * q) / (2 * q) * z)
        assert z_minus == pytest.approx(z_plus)

    def test_structure_eval_reports_branch_degeneracy(self):
        p = RacahParams(alpha=1.2, beta=0.4, gamma=0.9, delta=1.1, q=0.5, N=2)
        zs = compute_zero_set(p)
        degenerate = dataclasses.replace(
            zs, zbar=np.array([2 * np.sqrt(p.gammadelta * p.q), zs.zbar[1]])
        )
        with pytest.raises(BranchDegenerate):
            racahspec.eval_structure(p, degenerate)

    def test_Z_branch_product(self):
        p = RacahParams(alpha=1.2, beta=0.4, gamma=0.9, delta=1.1, q=0.6, N=2)
        for z in (1.7, 0.4 + 0.9j, -2.2):
            z_plus = racahspec.point_structure(p, z, +1).Zval
            z_minus = racahspec.point_structure(p, z, -1).Zval
            assert z_plus * z_minus == pytest.approx(1 / (p.gammadelta * p.q))

    def test_shift_derivative_matches_central_differences(self):
        p = RacahParams(alpha=1.2, beta=0.4, gamma=0.9, delta=1.1, q=0.6, N=2)
        h = 1e-7
        for z in (1.7, 0.5 + 1.1j):
            pt = racahspec.point_structure(p, z, +1)
            up = racahspec.shift_targets(p.q, p.gammadelta, z + h)
            dn = racahspec.shift_targets(p.q, p.gammadelta, z - h)
            assert abs(pt.Cplus - (up[0] - dn[0]) / (2 * h)) <= 1e-6 * (1 + abs(pt.Cplus))
            assert abs(pt.Cminus - (up[1] - dn[1]) / (2 * h)) <= 1e-6 * (1 + abs(pt.Cminus))

    def test_BD_derivatives_match_central_differences(self):
        p = RacahParams(alpha=1.2, beta=0.4, gamma=0.9 + 0.2j, delta=1.1, q=0.6, N=2)
        h = 1e-7
        for z in (1.9, 0.8 - 1.2j):
            pt = racahspec.point_structure(p, z, +1)
            up = racahspec.point_structure(p, z + h, +1)
            dn = racahspec.point_structure(p, z - h, +1)
            assert abs(pt.Bp - (up.Bval - dn.Bval) / (2 * h)) <= 1e-6 * (1 + abs(pt.Bp))
            assert abs(pt.Dp - (up.Dval - dn.Dval) / (2 * h)) <= 1e-6 * (1 + abs(pt.Dp))


class TestMatrixL:
    def test_linear_anchor_entry(self):
        zs = compute_zero_set(ANCHOR)
        l = racahspec.build_matrix_L(ANCHOR, zs)
        assert l.entries[0, 0] == pytest.approx(-0.5, abs=1e-12)
        assert l.label == "L"

    def test_spectrum_matches_prediction(self):
        p, zs = random_instance(8, 0.6, 2)
        l = racahspec.build_matrix_L(p, zs)
        assert match_spectra(eigenvalues(l.entries), l.predicted).max_rel_gap <= 1e-6

    def test_spectrum_matches_prediction_larger(self):
        p, zs = random_instance(9, 0.3, 7)
        l = racahspec.build_matrix_L(p, zs)
        assert match_spectra(eigenvalues(l.entries), l.predicted).max_rel_gap <= 1e-6

    def test_global_branch_flip_invariance(self):
        p, zs = random_instance(5, 0.6, 5)
        base = racahspec.build_matrix_L(p, zs, branch=+1).entries
        flipped = racahspec.build_matrix_L(p, zs, branch=-1).entries
        scale = np.max(np.abs(base))
        assert np.max(np.abs(flipped - base) / np.maximum(np.abs(base), 1e-3 * scale)) <= 1e-8

    def test_spectrum_depends_only_on_alphabeta(self):
        p, zs = random_instance(12, 0.6, 3)
        base = eigenvalues(racahspec.build_matrix_L(p, zs).entries)
        swapped = RacahParams(
            alpha=p.beta, beta=p.alpha, gamma=p.gamma, delta=p.delta, q=p.q, N=p.N
        )
        other = eigenvalues(racahspec.build_matrix_L(swapped, compute_zero_set(swapped)).entries)
        assert match_spectra(other, base).max_rel_gap <= 1e-8


class TestPredictedLambda:
    def test_anchor(self):
        assert racahspec.predicted_lambda(ANCHOR) == pytest.approx([-0.5])

    def test_hand_values_degree_two(self):
        p = RacahParams(alpha=3, beta=2, gamma=0.25, delta=5, q=0.5, N=2)  # alpha*beta = 6
        assert racahspec.predicted_lambda(p) == pytest.approx([5 / 4, 3 / 4])

    def test_vanishes_as_q_power_approaches_one(self):
        p = RacahParams(alpha=0.3, beta=0.4, gamma=0.5, delta=0.6, q=-1.0 + 1e-9, N=2)
        lam = racahspec.predicted_lambda(p)
        assert abs(lam[1]) <= 1e-6


class TestProp23Residuals:
    def test_anchor_exact(self):
        zs = compute_zero_set(ANCHOR)
        assert racahspec.prop23_residuals(ANCHOR, zs).max() <= 1e-12

    def test_random_degree_four(self):
        p, zs = random_instance(14, 0.45, 4)
        assert racahspec.prop23_residuals(p, zs).max() <= 1e-8

    def test_perturbed_zero_detected(self):
        p, zs = random_instance(14, 0.45, 4)
        zb = zs.zbar.copy()
        zb[1] *= 1 + 1e-2
        assert racahspec.prop23_residuals(p, dataclasses.replace(zs, zbar=zb))[1] > 1e-4


class TestDifferenceOperator:
    def test_constant_annihilated(self):
        for z in (1.7, 0.4 + 0.9j):
            assert abs(racahspec.apply_racah_difference(ANCHOR, lambda _: 1.0, z)) <= 1e-12

    def test_eigenrelation_on_polynomial(self):
        p = RacahParams(alpha=1.1, beta=0.6, gamma=0.8 + 0.2j, delta=1.3, q=0.5, N=5)
        expected = racahspec.racah_eigenvalue(p)
        f = lambda z: racah_eval(p, z)[0]
        stream = SplitMix64(2)
        for _ in range(10):
            z = 3 * stream.next_param()
            ratio = racahspec.apply_racah_difference(p, f, z) / f(z)
            assert abs(ratio - expected) <= 1e-9 * abs(expected)

    def test_branch_independence(self):
        p = RacahParams(alpha=1.1, beta=0.6, gamma=0.8, delta=1.3, q=0.5, N=4)
        f = lambda z: racah_eval(p, z)[0]
        for z in (1.9, 0.8 - 1.2j):
            plus = racahspec.apply_racah_difference(p, f, z, branch=+1)
            minus = racahspec.apply_racah_difference(p, f, z, branch=-1)
            assert abs(plus - minus) <= 1e-9 * (1 + abs(plus))


class TestCorollaries:
    def test_anchor_trace_and_det(self):
        zs = compute_zero_set(ANCHOR)
        l = racahspec.build_matrix_L(ANCHOR, zs)
        assert np.trace(l.entries) == pytest.approx(-0.5, abs=1e-12)
        assert determinant(l.entries) == pytest.approx(-0.5, abs=1e-12)
        assert racahspec.trace_closed_form(ANCHOR) == pytest.approx(-0.5)
        assert racahspec.det_closed_form(ANCHOR) == pytest.approx(-0.5)

    def test_hand_determinant_degree_two(self):
        p = RacahParams(alpha=3, beta=2, gamma=0.25, delta=5, q=0.5, N=2)
        zs = compute_zero_set(p)
        l = racahspec.build_matrix_L(p, zs)
        assert determinant(l.entries) == pytest.approx(15 / 16, rel=1e-8)
        assert racahspec.det_closed_form(p) == pytest.approx(15 / 16)

    def test_report_all_pass(self):
        p, zs = random_instance(4, 0.5, 3)
        l = racahspec.build_matrix_L(p, zs)
        report = racahspec.verify_corollaries(p, l)
        assert report.passed
        names = {c.name for c in report.checks}
        assert {"cor2.4.3-trace-k1", "cor2.4.3-det", "cor2.4.2-isospectral"} <= names

    def test_diophantine_rational_spectrum(self):
        p = RacahParams(alpha=3, beta=1 / 9, gamma=2 / 3, delta=5 / 4, q=0.5, N=5)
        zs = compute_zero_set(p)
        l = racahspec.build_matrix_L(p, zs)
        q, prod = Fraction(1, 2), Fraction(1, 3)
        exact = [
            Fraction(1) / q**5 * (1 - q**n) * (1 - prod * q ** (11 - n)) for n in range(1, 6)
        ]
        match = match_spectra(eigenvalues(l.entries), np.array([float(f) for f in exact]))
        assert match.max_abs_gap <= 1e-8
