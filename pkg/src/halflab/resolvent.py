"""Spatial Green's functions, their difference R, and the inverse Laplace
reconstruction of the temporal kernels.

The half-line spatial Green's function G(z, j0, .) solves (z - T)w =
delta_{j0} with the ghost rows of the boundary extrapolation; it is computed
as one banded solve on a truncated window with zero Dirichlet far field,
which is legitimate because the true solution decays geometrically.  The
whole-line one is the Fourier integral

    Gt(z, j) = (1/2pi) int_0^{2pi} e^{i j theta} / (z - F(e^{i theta})) dtheta,

sampled by FFT (the sign of the exponent is pinned by the resolvent
identity: the j = +-1 values of an asymmetric stencil break the tie).
Temporal kernels are recovered through the Cauchy integral

    G(n, j0, j) = (1/2pi i) oint z^n G(z, j0, j) dz

on the circle of radius e^{r0}, a trapezoid sum that is spectrally accurate
and serves as an independent oracle for the time-stepping path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .scheme import SchemeDefinition
from .spectral import MultiplicityError, _symbol_curve, lopatinskii

__all__ = [
    "NearSpectrumError", "QuadratureError", "ResolventField",
    "spatial_green_half", "spatial_green_whole", "r_function",
    "inverse_laplace_reconstruct", "inverse_laplace_table",
    "ReconstructionTable",
]

_FFT_CAP = 2 ** 22
_CONTOUR_CAP = 2 ** 16


class NearSpectrumError(RuntimeError):
    """z too close to the spectrum for a reliable resolvent solve."""


class QuadratureError(RuntimeError):
    """A quadrature or truncation loop failed to settle."""


@dataclass(frozen=True)
class ResolventField:
    """A spatial Green's function on a truncated window; j0 is None for the
    whole-line kernel.  truncation_residual bounds the defect of the
    untruncated resolvent equations over the inner 80% of the window."""

    z: complex
    j0: int | None
    j_min: int
    values: np.ndarray
    truncation_residual: float

    @property
    def j_max(self) -> int:
        return self.j_min + self.values.size - 1

    def value(self, j: int) -> complex:
        idx = j - self.j_min
        if idx < 0 or idx >= self.values.size:
            return 0.0 + 0.0j
        return complex(self.values[idx])


def _curve_distance(scheme: SchemeDefinition, z: complex) -> float:
    return float(np.min(np.abs(_symbol_curve(scheme) - z)))


def _guard_resolvent(scheme: SchemeDefinition, z: complex,
                     check_lopatinskii: bool):
    dist = _curve_distance(scheme, z)
    if dist < 1e-6:
        raise NearSpectrumError(
            f"z = {z!r} lies within {dist:.2e} of the symbol curve")
    if check_lopatinskii:
        try:
            val = lopatinskii(scheme, z).value
        except MultiplicityError as exc:
            raise NearSpectrumError(
                f"z = {z!r} is encircled by the symbol curve") from exc
        if abs(val) <= 1e-8:
            raise NearSpectrumError(
                f"Lopatinskii determinant is {abs(val):.2e} at z = {z!r}; "
                "z is an eigenvalue of the half-line operator")


def _half_system(scheme: SchemeDefinition, z: complex, J_trunc: int):
    """Banded matrix (scipy ab layout) for unknowns w_{1-r}, ..., w_{J_trunc}."""
    r, p = scheme.r, scheme.p
    M = J_trunc + r
    lo, up = r, p + r - 1
    ab = np.zeros((lo + up + 1, M), dtype=complex)

    def put(i, j, val):
        ab[up + i - j, j] += val

    for m in range(r):
        put(m, m, 1.0)
        i_b = r - 1 - m
        for k in range(1, scheme.p_b + 1):
            put(m, r - 1 + k, -scheme.b[i_b, k - 1])
    for j in range(1, J_trunc + 1):
        m = j + r - 1
        put(m, m, z)
        for k in range(-r, p + 1):
            if m + k < M:
                put(m, m + k, -scheme.coeff(k))
    return ab, lo, up


def _interior_residual(scheme: SchemeDefinition, z: complex, w: np.ndarray,
                       rhs_j0: int | None, J_trunc: int) -> float:
    """Defect of the untruncated equations on the inner 80% of the window;
    w is indexed so w[j + r - 1] holds the value at cell j."""
    r, p = scheme.r, scheme.p
    top = int(0.8 * J_trunc)
    worst = 0.0
    for j in range(1, top + 1):
        acc = z * w[j + r - 1]
        for k in range(-r, p + 1):
            acc -= scheme.coeff(k) * w[j + k + r - 1]
        if rhs_j0 is not None and j == rhs_j0:
            acc -= 1.0
        worst = max(worst, abs(acc))
    return worst


def spatial_green_half(scheme: SchemeDefinition, z: complex, j0: int,
                       J_trunc: int | None = None) -> ResolventField:
    """G(z, j0, .) on the window 1-r..J_trunc by one banded solve.

    The window is doubled (up to three times) whenever the far tail is not
    yet negligible against the sup of the solution.
    """
    if j0 < 1:
        raise ValueError("source index must satisfy j0 >= 1")
    if J_trunc is None:
        J_trunc = j0 + 200
    if J_trunc < j0 + 200:
        raise ValueError("truncation window must extend at least 200 cells "
                         "past the source")
    z = complex(z)
    _guard_resolvent(scheme, z, check_lopatinskii=True)
    r, p = scheme.r, scheme.p
    for _ in range(4):
        ab, lo, up = _half_system(scheme, z, J_trunc)
        rhs = np.zeros(J_trunc + r, dtype=complex)
        rhs[j0 + r - 1] = 1.0
        try:
            w = solve_banded((lo, up), ab, rhs)
        except np.linalg.LinAlgError as exc:
            raise NearSpectrumError(
                f"singular resolvent system at z = {z!r}") from exc
        scale = float(np.max(np.abs(w)))
        tail = float(np.max(np.abs(w[-(p + r):])))
        if scale == 0.0 or tail <= 1e-12 * scale:
            break
        J_trunc *= 2
    else:
        raise QuadratureError(
            f"half-line window still carries a tail of {tail:.2e} relative "
            f"to {scale:.2e} after extensions (z = {z!r})")
    res = _interior_residual(scheme, z, w, j0, J_trunc)
    if not np.isfinite(res) or res > 1e-8:
        raise NearSpectrumError(
            f"resolvent solve at z = {z!r} left residual {res:.2e}")
    return ResolventField(z=z, j0=j0, j_min=1 - r, values=w,
                          truncation_residual=res)


def spatial_green_whole(scheme: SchemeDefinition, z: complex,
                        window: int) -> ResolventField:
    """Gt(z, .) on |j| <= window by FFT of the sampled symbol reciprocal,
    doubling the node count until the window values settle below 1e-10."""
    if window < 1:
        raise ValueError("window must be >= 1")
    z = complex(z)
    _guard_resolvent(scheme, z, check_lopatinskii=False)
    r, p = scheme.r, scheme.p
    N = 1024
    while N < 8 * (window + p + r):
        N *= 2
    prev = None
    while N <= _FFT_CAP:
        theta = 2.0 * np.pi * np.arange(N) / N
        kappa = np.exp(1j * theta)
        frac = 1.0 / (z - _symbol_on(scheme, kappa))
        full = np.fft.ifft(frac)
        idx = np.arange(-window, window + 1) % N
        vals = full[idx]
        if prev is not None and float(np.max(np.abs(vals - prev))) < 1e-10:
            break
        prev = vals
        N *= 2
    else:
        raise QuadratureError(
            f"whole-line quadrature did not settle at z = {z!r} within "
            f"{_FFT_CAP} nodes")
    res = _whole_residual(scheme, z, vals, window)
    return ResolventField(z=z, j0=None, j_min=-window, values=vals,
                          truncation_residual=res)


def _symbol_on(scheme: SchemeDefinition, kappa: np.ndarray) -> np.ndarray:
    out = np.zeros_like(kappa, dtype=complex)
    for k in range(-scheme.r, scheme.p + 1):
        out += scheme.coeff(k) * kappa ** k
    return out


def _whole_residual(scheme: SchemeDefinition, z: complex, vals: np.ndarray,
                    window: int) -> float:
    r, p = scheme.r, scheme.p
    top = int(0.8 * window)
    worst = 0.0
    for j in range(-top, top + 1):
        acc = z * vals[j + window]
        for k in range(-r, p + 1):
            acc -= scheme.coeff(k) * vals[j + k + window]
        if j == 0:
            acc -= 1.0
        worst = max(worst, abs(acc))
    return worst


def r_function(scheme: SchemeDefinition, z: complex, j0: int, j):
    """R(z, j0, j) = G(z, j0, j) - Gt(z, j - j0); vectorized over j."""
    js = np.atleast_1d(np.asarray(j, dtype=int)).ravel()
    scalar = np.isscalar(j) or np.asarray(j).ndim == 0
    top = int(np.max(js))
    half = spatial_green_half(scheme, z, j0,
                              J_trunc=max(j0 + 200, top + 50))
    width = int(np.max(np.abs(js - j0))) + 8
    whole = spatial_green_whole(scheme, z, window=width)
    out = np.array([half.value(int(jj)) - whole.value(int(jj) - j0)
                    for jj in js])
    return (out[0] if scalar else out.reshape(np.shape(j)))


def _ring(r0: float, N: int) -> np.ndarray:
    rho = math.exp(r0)
    return rho * np.exp(2j * np.pi * np.arange(N) / N)


def inverse_laplace_reconstruct(scheme: SchemeDefinition, n: int, j0: int,
                                j: int, r0: float = 0.05,
                                whole_line: bool = False,
                                tol: float = 1e-9) -> complex:
    """(1/2pi i) oint z^n G(z, j0, j) dz on the circle e^{r0} S^1; with
    whole_line=True reconstructs the convolution kernel at cell j instead
    (j0 ignored).  Returns the complex trapezoid value; its imaginary part
    is a sanity diagnostic and stays at roundoff scale."""
    if n < 0:
        raise ValueError("time index must be >= 0")
    if r0 <= 0:
        raise ValueError("contour exponent r0 must be positive")
    N = 64
    while N < 4 * (n + scheme.p + scheme.r):
        N *= 2

    def total(N: int) -> complex:
        zs = _ring(r0, N)
        half_count = N // 2
        acc = 0.0 + 0.0j
        for m in range(half_count + 1):
            z = zs[m]
            if whole_line:
                g = spatial_green_whole(scheme, z,
                                        window=abs(int(j)) + 8).value(int(j))
            else:
                g = spatial_green_half(scheme, z, j0).value(int(j))
            term = g * z ** (n + 1)
            if m == 0 or (N % 2 == 0 and m == half_count):
                acc += term
            else:
                acc += term + np.conj(term)
        return acc / N

    prev = total(N)
    while N < _CONTOUR_CAP:
        N *= 2
        cur = total(N)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"contour reconstruction did not settle within {_CONTOUR_CAP} nodes")


@dataclass(frozen=True)
class ReconstructionTable:
    """Batch contour reconstruction: values[i0, n, i] approximates the
    temporal Green's function at (n, j0_values[i0], j_values[i])."""

    r0: float
    n_values: np.ndarray
    j0_values: np.ndarray
    j_values: np.ndarray
    values: np.ndarray
    max_imag: float
    nodes: int


def inverse_laplace_table(scheme: SchemeDefinition, n_max: int, j0_list,
                          j_list, r0: float = 0.05,
                          tol: float = 1e-9) -> ReconstructionTable:
    """All reconstructions n <= n_max on a (j0, j) grid, sharing one banded
    factorization per contour node (conjugate symmetry halves the ring)."""
    if n_max < 0:
        raise ValueError("time horizon must be >= 0")
    if r0 <= 0:
        raise ValueError("contour exponent r0 must be positive")
    j0s = np.asarray(sorted(set(int(v) for v in j0_list)), dtype=int)
    js = np.asarray(sorted(set(int(v) for v in j_list)), dtype=int)
    if j0s.size == 0 or js.size == 0 or j0s[0] < 1 or js[0] < 1 - scheme.r:
        raise ValueError("index grids must be nonempty and on the domain")
    J_trunc = int(max(j0s[-1] + 200, js[-1] + 50))
    r = scheme.r
    rows = js + r - 1

    N = 64
    while N < 4 * (n_max + scheme.p + scheme.r):
        N *= 2

    def table(N: int):
        zs = _ring(r0, N)
        half_count = N // 2
        G = np.empty((half_count + 1, j0s.size, js.size), dtype=complex)
        for m in range(half_count + 1):
            z = zs[m]
            _guard_resolvent(scheme, z, check_lopatinskii=True)
            ab, lo, up = _half_system(scheme, z, J_trunc)
            rhs = np.zeros((J_trunc + r, j0s.size), dtype=complex)
            rhs[j0s + r - 1, np.arange(j0s.size)] = 1.0
            w = solve_banded((lo, up), ab, rhs)
            G[m] = w[rows, :].T
        powers = zs[:half_count + 1, None] ** (np.arange(n_max + 1)[None, :] + 1)
        # conjugate reflection: m and N - m pair up, so the ring total is
        # 2 Re(sum of the open half) plus the self-conjugate m = 0, N/2 terms
        weights = np.full(half_count + 1, 2.0)
        weights[0] = 1.0
        if N % 2 == 0:
            weights[half_count] = 1.0
        wp = powers * weights[:, None]
        out = (np.einsum("mn,mij->inj", wp.real, G.real)
               - np.einsum("mn,mij->inj", wp.imag, G.imag)) / N
        self_rows = [0] + ([half_count] if N % 2 == 0 else [])
        imag = sum(np.einsum("n,ij->inj", powers[m].imag, G[m].real)
                   + np.einsum("n,ij->inj", powers[m].real, G[m].imag)
                   for m in self_rows) / N
        return out, float(np.max(np.abs(imag)))

    prev, _ = table(N)
    while N <= _CONTOUR_CAP:
        N *= 2
        cur, max_imag = table(N)
        if float(np.max(np.abs(cur - prev))) < tol:
            return ReconstructionTable(r0=r0,
                                       n_values=np.arange(n_max + 1),
                                       j0_values=j0s, j_values=js,
                                       values=cur, max_imag=max_imag,
                                       nodes=N)
        prev = cur
    raise QuadratureError(
        f"table reconstruction did not settle within {_CONTOUR_CAP} nodes")
