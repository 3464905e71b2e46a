"""Boundary-layer profiles and the Green's function error decomposition.

In the marginal regime (simple Lopatinskii zero at z = 1) the temporal
Green's function splits as

    G(n, j0, j) = Gt(n, j-j0) + 1_{np >= j0} Ru(j0, j)
                  + E_{2mu}^beta((j0 + n alpha)/n^{1/2mu}) Rc(j) + Err,

where Gt is the whole-line kernel, Rc is a j0-independent reflected layer
excited as the wave crosses the boundary, Ru is a transmitted layer tied to
the strictly unstable directions at z = 1, and Err carries a Gaussian-in-j0,
exponential-in-j bound.  Both layers come from the residue data at z = 1:
with A = (B e_1(1) ... B e_r(1)) singular and D(1) = adj(A)/Delta'(1),

    coeffs(w) = -D(1) B ((1/a_p) w),    profile(j) = sum_m coeffs_m kappa_m^{j-1+r},

where w is pi_c(1) e for the reflected layer and M(1)^{-j0} pi_su(1) e for
the transmitted one; the kappa_m are the stable roots at 1, and all matrix
powers go through the eigenbasis (dense powers would excite the unstable
directions through roundoff).  The kappa_m^{j-1+r} factor is the p-th
companion coordinate of M(1)^{j-1} applied to the stable eigenvectors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .evolution import temporal_green, temporal_green_whole
from .gaussian import GaussianParams, gaussian_e, gaussian_h
from .scheme import SchemeDefinition, boundary_matrix, check_hypothesis_one
from .spectral import lopatinskii_derivative_at_one, projector_set, stable_basis

__all__ = [
    "BoundaryLayerProfile", "ErrField", "ErrBoundFit", "rc_analytic",
    "rc_empirical", "ru_analytic", "err_field", "err_bound_fit",
    "whole_line_asymptotic_check",
]


def _adjugate(A: np.ndarray) -> np.ndarray:
    """adj(A) with adj(A) A = det(A) I; cofactor minors, fine for small r."""
    d = A.shape[0]
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            minor = np.delete(np.delete(A, i, axis=0), j, axis=1)
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _real_profile(vals: np.ndarray) -> np.ndarray:
    vals = np.asarray(vals)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    worst = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if worst > 1e-8 * scale:
        raise RuntimeError(
            f"layer profile has imaginary residue {worst:.3e} beyond "
            "conditioning expectations for a real stencil")
    return np.ascontiguousarray(vals.real)


def _decay_fit(js: np.ndarray, mags: np.ndarray):
    """Fit |profile| ~ C exp(-c j) on the last 20% of the j range."""
    mags = np.abs(np.asarray(mags, dtype=float))
    if not np.any(mags > 0):
        return 0.0, math.inf
    k = max(3, int(math.ceil(0.2 * js.size)))
    jt, vt = js[-k:].astype(float), mags[-k:]
    mask = vt > 0
    if np.count_nonzero(mask) < 2:
        return 0.0, math.inf
    A = np.stack([jt[mask], np.ones(int(np.count_nonzero(mask)))], axis=1)
    sol, *_ = np.linalg.lstsq(A, np.log(vt[mask]), rcond=None)
    return float(np.exp(sol[1])), float(-sol[0])


@dataclass(frozen=True)
class BoundaryLayerProfile:
    """A layer profile with a fitted exponential envelope C e^{-c j}.

    `values` is 1-D over j for the reflected layer, 2-D (j0 rows, j columns)
    for the transmitted one; a vanishing profile fits (C, c) = (0, inf).
    """

    kind: str
    provenance: str
    j_values: np.ndarray
    values: np.ndarray
    j0_values: np.ndarray | None
    decay_C: float
    decay_c: float


def _profile(kind: str, provenance: str, js: np.ndarray, vals: np.ndarray,
             j0s: np.ndarray | None = None) -> BoundaryLayerProfile:
    mags = np.abs(vals) if vals.ndim == 1 else np.abs(vals).max(axis=0)
    C, c = _decay_fit(js, mags)
    return BoundaryLayerProfile(kind=kind, provenance=provenance,
                                j_values=js, values=vals, j0_values=j0s,
                                decay_C=C, decay_c=c)


def _delta_at_one(scheme: SchemeDefinition):
    basis = stable_basis(scheme, 1.0)
    B = boundary_matrix(scheme)
    A = B @ basis.vectors
    return basis, B, A, complex(np.linalg.det(A))


def _require_marginal(delta1: complex):
    if abs(delta1) > 1e-8:
        raise ValueError(
            "no marginal boundary layer: the Lopatinskii determinant does "
            f"not vanish at z = 1 (|Delta(1)| = {abs(delta1):.3e})")


def _layer_coeffs(scheme: SchemeDefinition, A: np.ndarray, B: np.ndarray,
                  w: np.ndarray) -> np.ndarray:
    dprime = lopatinskii_derivative_at_one(scheme)
    return -(_adjugate(A) / dprime) @ (B @ w)


def rc_analytic(scheme: SchemeDefinition, J_max: int) -> BoundaryLayerProfile:
    """Reflected layer Rc(j), j = 1..J_max, from the residue data at z = 1."""
    if J_max < 1:
        raise ValueError("J_max must be >= 1")
    basis, B, A, delta1 = _delta_at_one(scheme)
    _require_marginal(delta1)
    ps = projector_set(scheme, 1.0)
    w = (ps.pi_c @ ps.e.astype(complex)) / scheme.a[-1]
    coeffs = _layer_coeffs(scheme, A, B, w)
    ks = np.asarray(basis.kappas)
    js = np.arange(1, J_max + 1)
    vals = (coeffs[:, None] * ks[:, None] ** (js[None, :] - 1 + scheme.r)).sum(axis=0)
    return _profile("reflected", "analytic", js, _real_profile(vals))


def ru_analytic(scheme: SchemeDefinition, j0_max: int,
                j_max: int) -> BoundaryLayerProfile:
    """Transmitted layer Ru(j0, j) on the grid 1..j0_max x 1..j_max.

    Identically zero when p = 1: the strictly unstable class at z = 1 is
    empty, so the pi_su source vanishes.
    """
    if j0_max < 1 or j_max < 1:
        raise ValueError("grid bounds must be >= 1")
    basis, B, A, delta1 = _delta_at_one(scheme)
    _require_marginal(delta1)
    js0 = np.arange(1, j0_max + 1)
    js = np.arange(1, j_max + 1)
    ps = projector_set(scheme, 1.0)
    su = ps.classes["su"]
    if not su:
        vals = np.zeros((j0_max, j_max))
    else:
        d = ps.Vinv @ ps.e.astype(complex)
        roots = np.asarray(ps.roots)
        W = np.zeros((scheme.p + scheme.r, j0_max), dtype=complex)
        for k in su:
            W += np.outer(ps.V[:, k], d[k] * roots[k] ** (-js0))
        W /= scheme.a[-1]
        CU = _layer_coeffs(scheme, A, B, W)
        ks = np.asarray(basis.kappas)
        powmat = ks[:, None] ** (js[None, :] - 1 + scheme.r)
        vals = _real_profile(CU.T @ powmat)
    return _profile("transmitted", "analytic", js, vals, j0s=js0)


def _green_rows(scheme: SchemeDefinition, n: int, j0: int,
                js: np.ndarray, gt_field=None):
    """(G(n,j0,j), Gt(n,j-j0)) on the j grid; gt_field reusable across j0."""
    G = temporal_green(scheme, n, j0)
    if gt_field is None:
        gt_field = temporal_green_whole(scheme, n)
    g = np.array([G.value(int(j)) for j in js])
    gt = np.array([gt_field.value(int(j) - j0) for j in js])
    return g, gt, gt_field


def _activation(scheme: SchemeDefinition, rep, n: int, j0: int) -> float:
    if n == 0:
        return 0.0
    params = GaussianParams(rep.mu, rep.beta)
    x = (j0 + n * rep.alpha) / n ** (1.0 / (2 * rep.mu))
    return float(gaussian_e(x, params))


@dataclass(frozen=True)
class ErrField:
    """The error remainder and the decomposition pieces it was built from."""

    n: int
    j0: int
    j_values: np.ndarray
    err: np.ndarray
    green: np.ndarray
    whole: np.ndarray
    ru_term: np.ndarray
    rc_term: np.ndarray
    indicator: int
    activation: float


def err_field(scheme: SchemeDefinition, n: int, j0: int,
              window: int) -> ErrField:
    """Err(n, j0, j) for j = 1..window, assembled exactly from the
    decomposition (layers taken as zero outside the marginal regime)."""
    if n < 0 or j0 < 1 or window < 1:
        raise ValueError("need n >= 0, j0 >= 1, window >= 1")
    js = np.arange(1, window + 1)
    rep = check_hypothesis_one(scheme)
    g, gt, _ = _green_rows(scheme, n, j0, js)
    ind = 1 if n * scheme.p >= j0 else 0
    act = _activation(scheme, rep, n, j0)
    _, _, _, delta1 = _delta_at_one(scheme)
    if abs(delta1) <= 1e-8:
        rc = rc_analytic(scheme, window).values
        ru_row = ru_analytic(scheme, j0, window).values[j0 - 1]
    else:
        rc = np.zeros(window)
        ru_row = np.zeros(window)
    ru_term = ind * ru_row
    rc_term = act * rc
    err = g - gt - ru_term - rc_term
    return ErrField(n=n, j0=j0, j_values=js, err=err, green=g, whole=gt,
                    ru_term=ru_term, rc_term=rc_term, indicator=ind,
                    activation=act)


@dataclass(frozen=True)
class ErrBoundFit:
    """Sweep of trial decay rates c0 against the weighted Err suprema.

    sups[i, k] is the supremum over the (j0, j) grid at n = n_values[k] of

        n^{1/2mu} |Err| e^{c0 j} exp(c0 (|n alpha + j0| / n^{1/2mu})^{2mu/(2mu-1)}),

    and best_c0 is the largest trial rate whose suprema do not grow along
    n_values (within growth_tol per step); 0.0 when every rate grows.
    heat[k, i] is the unweighted n^{1/2mu} sup_j |Err(n, j0_i, j)|.
    """

    mu: int
    n_values: np.ndarray
    j0_values: np.ndarray
    j_values: np.ndarray
    c0_values: np.ndarray
    sups: np.ndarray
    best_c0: float
    heat: np.ndarray
    growth_tol: float


def err_bound_fit(scheme: SchemeDefinition, n_list=(250, 500, 1000, 2000),
                  j0_list=None, j_list=(1,), c0_list=None,
                  growth_tol: float = 0.05) -> ErrBoundFit:
    """Measure the Gaussian-in-j0, exponential-in-j envelope of Err."""
    ns = np.asarray(sorted(int(n) for n in n_list), dtype=int)
    if ns.size == 0 or ns[0] < 1:
        raise ValueError("n grid must be nonempty and positive")
    j0s = (np.arange(50, 1001, 50) if j0_list is None
           else np.asarray(sorted(int(v) for v in j0_list), dtype=int))
    js = np.asarray(sorted(int(v) for v in j_list), dtype=int)
    if j0s.size == 0 or js.size == 0:
        raise ValueError("j0 and j grids must be nonempty")
    c0s = (np.geomspace(1e-3, 2.0, 40) if c0_list is None
           else np.asarray(c0_list, dtype=float))
    rep = check_hypothesis_one(scheme)
    mu = rep.mu
    expo = 2.0 * mu / (2.0 * mu - 1.0)
    _, _, _, delta1 = _delta_at_one(scheme)
    marginal = abs(delta1) <= 1e-8
    window = int(js[-1])
    rc = (rc_analytic(scheme, window).values if marginal
          else np.zeros(window))
    ru_all = (ru_analytic(scheme, int(j0s[-1]), window).values if marginal
              else np.zeros((int(j0s[-1]), window)))

    abs_err = np.empty((ns.size, j0s.size, js.size))
    args = np.empty((ns.size, j0s.size))
    for k, n in enumerate(ns):
        gt_field = None
        for i, j0 in enumerate(j0s):
            g, gt, gt_field = _green_rows(scheme, int(n), int(j0), js,
                                          gt_field)
            ind = 1 if n * scheme.p >= j0 else 0
            act = _activation(scheme, rep, int(n), int(j0))
            err = g - gt - ind * ru_all[j0 - 1, js - 1] - act * rc[js - 1]
            abs_err[k, i] = np.abs(err)
            args[k, i] = (abs(n * rep.alpha + j0) / n ** (1.0 / (2 * mu))) ** expo

    scale_n = ns.astype(float) ** (1.0 / (2 * mu))
    heat = scale_n[:, None] * abs_err.max(axis=2)
    sups = np.empty((c0s.size, ns.size))
    for a, c0 in enumerate(c0s):
        # large trial rates overflow the Gaussian weight; a zero-error cell
        # times an infinite weight carries no information and counts as zero
        with np.errstate(over="ignore", invalid="ignore"):
            weighted = (abs_err * np.exp(c0 * js)[None, None, :]
                        * np.exp(c0 * args)[:, :, None]
                        * scale_n[:, None, None])
        weighted = np.where(np.isnan(weighted), 0.0, weighted)
        sups[a] = weighted.max(axis=(1, 2))
    best = 0.0
    for a in range(c0s.size):
        s = sups[a]
        if np.all(np.isfinite(s)) and \
                np.all(s[1:] <= (1.0 + growth_tol) * s[:-1]):
            best = float(c0s[a])
    return ErrBoundFit(mu=mu, n_values=ns, j0_values=j0s, j_values=js,
                       c0_values=c0s, sups=sups, best_c0=best, heat=heat,
                       growth_tol=growth_tol)


def rc_empirical(scheme: SchemeDefinition, j0: int, n: int,
                 window: int) -> BoundaryLayerProfile:
    """Reflected layer extracted from evolution snapshots: the Green
    difference minus the transmitted layer, divided by the activation."""
    if j0 < 1 or window < 1 or n < 0:
        raise ValueError("need j0 >= 1, window >= 1, n >= 0")
    js = np.arange(1, window + 1)
    if n == 0:
        warnings.warn("degenerate extraction at n = 0: activation is zero, "
                      "returning the raw Green difference", stacklevel=2)
        return _profile("reflected", "empirical", js, np.zeros(window))
    rep = check_hypothesis_one(scheme)
    if n < 2.0 * j0 / abs(rep.alpha):
        warnings.warn(
            f"activation regime barely reached (n = {n} < 2 j0/|alpha| = "
            f"{2.0 * j0 / abs(rep.alpha):.0f}); extraction is biased",
            stacklevel=2)
    g, gt, _ = _green_rows(scheme, n, j0, js)
    ind = 1 if n * scheme.p >= j0 else 0
    _, _, _, delta1 = _delta_at_one(scheme)
    if abs(delta1) <= 1e-8 and ind:
        ru_row = ru_analytic(scheme, j0, window).values[j0 - 1]
    else:
        ru_row = np.zeros(window)
    act = _activation(scheme, rep, n, j0)
    vals = (g - gt - ind * ru_row) / act
    return _profile("reflected", "empirical", js, vals)


def whole_line_asymptotic_check(scheme: SchemeDefinition, n_list):
    """Rows (n, sup_j |Gt - Gaussian|, n^{1/2mu} sup): the scaled sup must
    trend to zero for the leading-order profile to be right."""
    rep = check_hypothesis_one(scheme)
    if not rep.satisfied:
        raise ValueError(
            f"scheme fails the dissipativity hypothesis: {rep.failure}")
    params = GaussianParams(rep.mu, rep.beta)
    rows = []
    for n in sorted(int(v) for v in n_list):
        if n < 1:
            raise ValueError("time grid must be positive")
        gt = temporal_green_whole(scheme, n)
        js = np.arange(gt.field.j_min, gt.field.j_max + 1)
        x = (js - n * rep.alpha) / n ** (1.0 / (2 * rep.mu))
        prof = gaussian_h(x, params) / n ** (1.0 / (2 * rep.mu))
        sup = float(np.max(np.abs(gt.field.values - prof)))
        rows.append((n, sup, n ** (1.0 / (2 * rep.mu)) * sup))
    return rows
