"""Generalized Gaussian profiles: closed forms, tail identities, contour rep."""

import numpy as np
import pytest

from halflab.gaussian import GaussianParams, appendix_f, gaussian_e, gaussian_h

P_HEAT = GaussianParams(mu=1, beta=0.25)
P_QUARTIC = GaussianParams(mu=2, beta=3.0 / 128.0)


def test_h_at_zero_heat():
    # (4 pi beta)^{-1/2} at beta = 1/4 is 1/sqrt(pi)
    assert abs(gaussian_h(0.0, P_HEAT) - 1.0 / np.sqrt(np.pi)) < 1e-8


def test_h_matches_heat_kernel():
    xs = np.linspace(-4.0, 4.0, 17)
    beta = 0.25
    exact = np.exp(-xs ** 2 / (4.0 * beta)) / np.sqrt(4.0 * np.pi * beta)
    got = gaussian_h(xs, P_HEAT)
    assert np.max(np.abs(got - exact)) < 1e-8


def test_h_even_and_decaying():
    got = gaussian_h(np.array([-2.0, 2.0]), P_QUARTIC)
    assert abs(got[0] - got[1]) < 1e-9
    assert abs(gaussian_h(9.0, P_QUARTIC)) < abs(gaussian_h(1.0, P_QUARTIC))


@pytest.mark.parametrize("params", [P_HEAT, P_QUARTIC], ids=["mu1", "mu2"])
def test_e_at_zero_is_half(params):
    assert abs(gaussian_e(0.0, params) - 0.5) < 1e-8


@pytest.mark.parametrize("params", [P_HEAT, P_QUARTIC], ids=["mu1", "mu2"])
def test_e_reflection_sums_to_one(params):
    xs = np.linspace(0.0, 5.0, 11)
    total = gaussian_e(xs, params) + gaussian_e(-xs, params)
    assert np.max(np.abs(total - 1.0)) < 1e-8


def test_e_tail_decay():
    # mu = 2 profiles oscillate, so only |E| decays at large |x|.
    vals = gaussian_e(np.array([1.0, 6.0]), P_QUARTIC)
    assert abs(vals[1]) < abs(vals[0])
    assert abs(vals[1]) < 1e-3
    heat = gaussian_e(np.array([0.0, 1.0, 3.0, 6.0]), P_HEAT)
    assert np.all(np.diff(heat) < 0)


@pytest.mark.parametrize("params", [P_HEAT, P_QUARTIC], ids=["mu1", "mu2"])
@pytest.mark.parametrize("s", [0.3, 0.7])
def test_contour_tail_identity(params, s):
    # -F(x, s) / (2 pi) reproduces E(x) for every admissible shift s.
    xs = np.array([0.5, 1.5])
    e_vals = gaussian_e(xs, params)
    f_vals = appendix_f(xs, s, params)
    assert np.max(np.abs(-f_vals / (2.0 * np.pi) - e_vals)) < 1e-6


def test_contour_shift_independence():
    xs = np.array([0.8])
    a = appendix_f(xs, 0.3, P_QUARTIC)
    b = appendix_f(xs, 0.7, P_QUARTIC)
    assert np.max(np.abs(a - b)) < 1e-6


def test_contour_requires_positive_shift():
    with pytest.raises(ValueError):
        appendix_f(1.0, 0.0, P_HEAT)
    with pytest.raises(ValueError):
        appendix_f(1.0, -0.5, P_HEAT)


def test_params_validation():
    with pytest.raises(ValueError):
        GaussianParams(mu=0, beta=0.25)
    with pytest.raises(ValueError):
        GaussianParams(mu=1.5, beta=0.25)
    with pytest.raises(ValueError):
        GaussianParams(mu=1, beta=-0.1)
    with pytest.raises(ValueError):
        GaussianParams(mu=1, beta=1j)
    p = GaussianParams(mu=2, beta=0.5 + 0.1j)
    assert not p.real_valued
    assert GaussianParams(mu=1, beta=0.25).real_valued


def test_params_of_scheme(lfr, o3):
    p1 = GaussianParams.of_scheme(lfr)
    assert p1.mu == 1
    assert abs(p1.beta - 0.25) < 1e-10
    p2 = GaussianParams.of_scheme(o3)
    assert p2.mu == 2
    assert abs(p2.beta - 3.0 / 128.0) < 1e-8


def test_scalar_and_array_shapes():
    assert np.isscalar(gaussian_h(1.0, P_HEAT)) or np.ndim(gaussian_h(1.0, P_HEAT)) == 0
    out = gaussian_h(np.zeros((2, 3)), P_HEAT)
    assert out.shape == (2, 3)
    out_e = gaussian_e(np.zeros(4), P_HEAT)
    assert out_e.shape == (4,)
