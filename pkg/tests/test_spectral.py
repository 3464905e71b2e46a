import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import halflab as hl
from halflab.spectral import (EigenConditioningError, MultiplicityError,
                              companion_matrix, projector_set)

from conftest import KAPPA_S_O3, KAPPA_U_O3, o3_marginal_pair


def test_roots_at_one_lfr(lfr):
    roots = np.sort_complex(hl.characteristic_roots(lfr, 1.0))
    np.testing.assert_allclose(roots, [0.2, 1.0], atol=1e-10)


def test_roots_at_one_o3(o3):
    roots = hl.characteristic_roots(o3, 1.0)
    want = np.array([KAPPA_S_O3, 1.0, KAPPA_U_O3])
    got = np.sort(roots.real)
    np.testing.assert_allclose(got, np.sort(want), atol=1e-10)
    assert np.max(np.abs(roots.imag)) < 1e-10


def test_roots_at_two_lfr(lfr):
    # 5 k^2 / 8 + (1/4 - 2) k + 1/8 = 0  =>  k = (14 +- sqrt(176)) / 10
    roots = np.sort_complex(hl.characteristic_roots(lfr, 2.0))
    want = np.array([(14 - math.sqrt(176)) / 10, (14 + math.sqrt(176)) / 10])
    np.testing.assert_allclose(roots.real, want, atol=1e-12)


def test_companion_determinant_z_independent(lfr, o3):
    # det M(z) = (-1)^{p+r} a_{-r} / a_p regardless of z
    for s in (lfr, o3):
        want = (-1.0) ** (s.p + s.r) * s.a[0] / s.a[-1]
        for z in (1.0, 2.0, 0.5 + 1.2j):
            det = np.linalg.det(companion_matrix(s, z))
            assert det == pytest.approx(want, abs=1e-12)
    assert (-1.0) ** 2 * lfr.a[0] / lfr.a[-1] == pytest.approx(0.2, abs=0)


def test_companion_eigenvectors_vandermonde(o3):
    z = 1.7 + 0.3j
    M = companion_matrix(o3, z)
    for k in hl.characteristic_roots(o3, z):
        v = k ** np.arange(o3.p + o3.r - 1, -1, -1)
        np.testing.assert_allclose(M @ v, k * v, atol=1e-9)


def test_characteristic_roots_solve_symbol(lfr, o3):
    # each root satisfies F(kappa) = z
    for s in (lfr, o3):
        for z in (1.3, 2.0 - 0.7j):
            for k in hl.characteristic_roots(s, z):
                assert abs(hl.symbol_eval(s, k) - z) < 1e-10


def test_spectral_split_regions(lfr):
    out = hl.spectral_split(lfr, 2.0)
    assert out.region == "outside"
    assert len(out.stable) == 1 and len(out.unstable) == 1
    one = hl.spectral_split(lfr, 1.0)
    assert one.region == "at_one"
    assert len(one.stable) == 1 and len(one.central) == 1


def test_spectral_split_counts_sampled(lfr, o3):
    for s in (lfr, o3):
        for rad in (1.05, 1.25, 2.5):
            for ang in np.linspace(0, 2 * math.pi, 17, endpoint=False):
                z = rad * np.exp(1j * ang)
                out = hl.spectral_split(s, z)
                assert out.region == "outside"
                assert len(out.stable) == s.r
                assert len(out.unstable) == s.p


def test_stable_basis_rejected_inside(lfr):
    # the LFR symbol curve is the ellipse 0.25 + 0.75 cos t + 0.5 i sin t,
    # so its center is strictly inside; no pinned stable count there
    z = 0.25 + 0.0j
    split = hl.spectral_split(lfr, z)
    assert split.region == "inside"
    assert split.winding != 0
    with pytest.raises(MultiplicityError):
        hl.stable_basis(lfr, z)


def test_lopatinskii_frozen_values(lfr):
    # Delta(z) = 1 - 5 kappa_s(z)
    val1 = hl.lopatinskii(lfr, 1.0)
    assert abs(val1.value) < 1e-10
    val2 = hl.lopatinskii(lfr, 2.0)
    ks = (14 - math.sqrt(176)) / 10
    assert val2.value == pytest.approx(1 - 5 * ks, abs=1e-10)
    assert abs(val2.value - 0.63324958) < 1e-6


def test_lopatinskii_derivative_at_one(lfr, o3):
    # Delta'(1) = -b kappa_s'(1) with kappa_s'(1) = -2/5 for the 3-point
    # scheme: 5 * 2/5 = 2
    d = hl.lopatinskii_derivative_at_one(lfr)
    assert d == pytest.approx(2.0, abs=1e-6)
    do3 = hl.lopatinskii_derivative_at_one(o3)
    assert abs(do3) > 1e-3     # z = 1 is a simple zero for the paper choice


def test_scheme_rescaling_leaves_roots(lfr):
    # multiplying the ghost weight changes Delta but not the roots
    other = hl.builtin_lfr(-0.5, 0.75, 2.0)
    np.testing.assert_allclose(
        np.sort_complex(hl.characteristic_roots(other, 2.0)),
        np.sort_complex(hl.characteristic_roots(lfr, 2.0)), atol=1e-12)


def test_projector_set_structure(lfr, o3):
    for s in (lfr, o3):
        ps = projector_set(s, 1.0)
        dim = s.p + s.r
        eye = np.eye(dim)
        total = ps.pi_ss + ps.pi_c + ps.pi_su
        np.testing.assert_allclose(total, eye, atol=1e-10)
        for P in (ps.pi_ss, ps.pi_c, ps.pi_su):
            np.testing.assert_allclose(P @ P, P, atol=1e-10)
        np.testing.assert_allclose(ps.pi_c @ ps.pi_ss,
                                   np.zeros((dim, dim)), atol=1e-10)
        assert np.linalg.matrix_rank(ps.pi_c, tol=1e-8) == 1
        assert abs(ps.central - 1.0) < 1e-10


def test_central_projection_of_source(lfr, o3):
    # pi_c(1) e = -(a_p / alpha) * ones; the sign comes from the residue of
    # the geometric series at kappa = 1
    for s in (lfr, o3):
        rep = hl.check_hypothesis_one(s)
        ps = projector_set(s, 1.0)
        want = -(s.a[-1] / rep.alpha) * np.ones(s.p + s.r)
        np.testing.assert_allclose(ps.pi_c @ ps.e, want, atol=1e-10)


def test_central_projection_frozen_constants(lfr, o3):
    ps = projector_set(lfr, 1.0)
    np.testing.assert_allclose((ps.pi_c @ ps.e).real, 1.25 * np.ones(2),
                               atol=1e-10)
    ps3 = projector_set(o3, 1.0)
    np.testing.assert_allclose((ps3.pi_c @ ps3.e).real,
                               -0.125 * np.ones(3), atol=1e-10)


def test_power_apply_matches_matrix(o3):
    ps = projector_set(o3, 2.0)
    M = companion_matrix(o3, 2.0)
    vec = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(ps.power_apply(3, vec),
                               M @ M @ M @ vec, atol=1e-9)


def test_residue_condition(lfr, o3):
    assert hl.residue_condition(lfr) is False
    assert hl.residue_condition(o3) is True


def test_residue_condition_dichotomy_family():
    # along the marginal line Delta(1) = 0 the reflected layer vanishes
    # exactly at the paper pair b2 = -1/kappa_s
    k = KAPPA_S_O3
    for delta in (-0.8, -0.3, 0.3, 0.8):
        b2 = -1.0 / k + delta
        b1 = (1.0 - b2 * k * k) / k
        s = hl.builtin_o3(-0.5, b1, b2)
        assert abs(hl.lopatinskii(s, 1.0).value) < 1e-10
        assert hl.residue_condition(s) is False
    b1, b2 = o3_marginal_pair()
    assert hl.residue_condition(hl.builtin_o3(-0.5, b1, b2)) is True


def test_hypothesis_two_verdicts(lfr, o3):
    rep = hl.check_hypothesis_two(lfr)
    assert rep.satisfied and rep.boundary_zero and rep.residue_ok is False
    assert rep.verdict == "ℓ¹-stable, ℓ^q-unstable for q>1"
    rep3 = hl.check_hypothesis_two(o3)
    assert rep3.satisfied and rep3.boundary_zero and rep3.residue_ok is True
    assert rep3.verdict == "ℓ^q-stable for all q"


def test_hypothesis_two_violation_witness():
    # ghost weight tuned so Delta vanishes at z = 2, an eigenvalue outside
    # the unit disk; the sweep needs a circle through 2 to see it
    ks = (14 - math.sqrt(176)) / 10
    bad = hl.builtin_lfr(-0.5, 0.75, 1.0 / ks)
    rep = hl.check_hypothesis_two(bad, radii=(1.0, 1.05, 1.25, 2.0, 2.5))
    assert not rep.satisfied
    assert rep.witness_z is not None
    assert abs(rep.witness_z - 2.0) < 1e-6
    assert rep.verdict.startswith("unstable")


def test_eigen_conditioning_guard():
    # the symmetric stencil has a double root kappa = 1 at z = 1; the
    # projector builder must refuse rather than return garbage
    s = hl.SchemeDefinition(r=1, p=1, a=np.array([0.25, 0.5, 0.25]),
                            p_b=1, b=np.array([[1.0]]))
    with pytest.raises((EigenConditioningError, MultiplicityError)):
        projector_set(s, 1.0)


@given(st.floats(1.08, 3.0), st.floats(0.0, 2 * math.pi))
def test_split_counts_outside_property(lfr, rad, ang):
    z = rad * np.exp(1j * ang)
    out = hl.spectral_split(lfr, z)
    assert out.region == "outside"
    assert len(out.stable) == 1 and len(out.unstable) == 1
