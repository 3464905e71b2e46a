"""Characteristic roots, spectral splits, Lopatinskii determinant, projectors.

For a stencil a_{-r}, ..., a_p and a spectral parameter z, the characteristic
equation is

    P(kappa; z) = z kappa^r - sum_k a_k kappa^{k+r} = 0,

a degree p+r polynomial with P(0) = -a_{-r} != 0.  Outside the symbol curve
F(S^1) (winding number zero) it has exactly r roots inside the open unit disk
and p outside; at z = 1 the curve is touched and kappa = 1 joins the unit
circle while r roots stay strictly inside.  The companion matrix M(z) of the
recurrence has the same roots as eigenvalues with Vandermonde eigenvectors
(kappa^{p+r-1}, ..., kappa, 1)^T, so spectral projectors and matrix powers
are always formed through that eigenbasis, never through dense powers.

The Lopatinskii determinant Delta(z) = det(B e_1(z), ..., B e_r(z)) pairs the
boundary matrix B with the stable eigenvectors; its zeros in the resolvent
region signal instability, a simple zero at z = 1 signals the marginal
boundary-layer regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .scheme import SchemeDefinition, boundary_matrix, symbol_eval

__all__ = [
    "RootSolveError", "MultiplicityError", "EigenConditioningError",
    "SpectralSplit", "StableBasis", "ProjectorSet", "LopatinskiiValue",
    "StabilityReport", "companion_matrix", "characteristic_roots",
    "spectral_split", "stable_basis", "lopatinskii",
    "lopatinskii_derivative_at_one", "projector_set", "residue_condition",
    "check_hypothesis_two",
]


class RootSolveError(RuntimeError):
    """Root iteration failed to converge or lost track of a root."""


class MultiplicityError(RuntimeError):
    """Root configuration degenerate (collision or wrong stable count)."""


class EigenConditioningError(RuntimeError):
    """Eigenvector basis too ill-conditioned for reliable projectors."""


def _char_coeffs(scheme: SchemeDefinition, z: complex) -> np.ndarray:
    """Ascending coefficients of P(kappa; z) = z kappa^r - kappa^r F(kappa)."""
    c = -scheme.a.astype(complex)
    c[scheme.r] += z
    return c


def companion_matrix(scheme: SchemeDefinition, z: complex) -> np.ndarray:
    """Companion matrix of the spatial recurrence at parameter z.

    State vector (u_{j+p-1}, ..., u_{j-r}); first row carries the solved-out
    top coefficient, ones on the subdiagonal shift the window.  Its
    determinant is (-1)^{p+r} a_{-r} / a_p, independent of z.
    """
    r, p = scheme.r, scheme.p
    d = p + r
    ap = scheme.a[-1]
    M = np.zeros((d, d), dtype=complex)
    for col, k in enumerate(range(p - 1, -r - 1, -1)):
        M[0, col] = ((z if k == 0 else 0.0) - scheme.coeff(k)) / ap
    for i in range(1, d):
        M[i, i - 1] = 1.0
    return M


def _aberth(coeffs: np.ndarray, tol: float = 1e-14,
            max_iter: int = 200) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration, ascending coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    d = c.size - 1
    dc = npoly.polyder(c)
    radius = abs(c[0] / c[-1]) ** (1.0 / d)
    angles = 2.0 * np.pi * (np.arange(d) + 0.5) / d + 0.4 / d
    x = radius * np.exp(1j * angles)
    steps = []
    for _ in range(max_iter):
        P = npoly.polyval(x, c)
        Pp = npoly.polyval(x, dc)
        bad = Pp == 0
        if np.any(bad):
            x[bad] *= 1.0 + 1e-8
            continue
        newton = P / Pp
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        denom = 1.0 - newton * inv.sum(axis=1)
        w = newton / denom
        x = x - w
        step = float(np.max(np.abs(w)))
        steps.append(step)
        if step < tol * max(1.0, float(np.max(np.abs(x)))):
            break
    else:
        raise RootSolveError(
            "simultaneous root iteration did not converge; last step sizes "
            f"{steps[-8:]!r}")
    for _ in range(3):
        Pp = npoly.polyval(x, dc)
        good = Pp != 0
        x[good] = x[good] - npoly.polyval(x[good], c) / Pp[good]
    scale = npoly.polyval(np.abs(x), np.abs(c))
    res = np.abs(npoly.polyval(x, c))
    if np.any(res > 1e-13 * np.maximum(scale, 1e-300)):
        raise RootSolveError(
            f"root residuals {res!r} exceed 1e-13 of coefficient scale "
            f"{scale!r} after Newton polish; step trace {steps[-8:]!r}")
    return x


def _sort_roots(roots: np.ndarray) -> np.ndarray:
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    return roots[order]


def characteristic_roots(scheme: SchemeDefinition, z: complex) -> np.ndarray:
    """All p+r roots of P(kappa; z), sorted by (|kappa|, arg kappa)."""
    return _sort_roots(_aberth(_char_coeffs(scheme, z)))


_CURVE_SAMPLES = 8192
_curve_cache: dict = {}


def _symbol_curve(scheme: SchemeDefinition) -> np.ndarray:
    key = (scheme.r, scheme.p, scheme.a.tobytes())
    got = _curve_cache.get(key)
    if got is None:
        t = np.linspace(0.0, 2.0 * np.pi, _CURVE_SAMPLES, endpoint=False)
        got = symbol_eval(scheme, np.exp(1j * t))
        _curve_cache[key] = got
    return got


def _winding(scheme: SchemeDefinition, z: complex):
    curve = _symbol_curve(scheme)
    rel = curve - z
    dist = float(np.min(np.abs(rel)))
    ang = np.unwrap(np.angle(rel))
    closing = np.angle(rel[0]) - ang[-1]
    closing = (closing + np.pi) % (2.0 * np.pi) - np.pi
    wind = int(round((ang[-1] - ang[0] + closing) / (2.0 * np.pi)))
    return wind, dist


@dataclass(frozen=True)
class SpectralSplit:
    """Roots of P(.; z) classified against the unit circle."""

    z: complex
    roots: tuple
    stable: tuple
    central: tuple
    unstable: tuple
    region: str
    winding: int


def spectral_split(scheme: SchemeDefinition, z: complex,
                   unit_tol: float = 1e-8) -> SpectralSplit:
    """Classify the characteristic roots at z and name the region of z.

    Regions: "at_one" (z = 1), "on_curve" (within 1e-7 of the sampled symbol
    curve), "outside" (winding number 0), "inside".  Outside, the counts are
    checked: exactly r stable roots, p unstable, none on the circle.  At
    z = 1 the checked layout is r stable, the single central root kappa = 1,
    and p-1 unstable.
    """
    z = complex(z)
    roots = characteristic_roots(scheme, z)
    mods = np.abs(roots)
    stable = tuple(roots[mods < 1.0 - unit_tol])
    central = tuple(roots[np.abs(mods - 1.0) <= unit_tol])
    unstable = tuple(roots[mods > 1.0 + unit_tol])
    wind, dist = _winding(scheme, z)
    if abs(z - 1.0) <= 1e-12:
        region = "at_one"
    elif dist < 1e-7:
        region = "on_curve"
    elif wind == 0:
        region = "outside"
    else:
        region = "inside"
    r, p = scheme.r, scheme.p
    if region == "outside":
        if len(stable) != r or len(unstable) != p or central:
            raise MultiplicityError(
                f"z={z!r} lies outside the symbol curve but the split is "
                f"{len(stable)} stable / {len(central)} central / "
                f"{len(unstable)} unstable (expected {r}/0/{p})")
    elif region == "at_one":
        if len(stable) != r or len(central) != 1 or \
                abs(central[0] - 1.0) > 1e-6:
            raise MultiplicityError(
                f"at z=1 expected {r} stable roots plus the central root "
                f"kappa=1, got {len(stable)} stable, central {central!r}")
    return SpectralSplit(z=z, roots=tuple(roots), stable=stable,
                         central=central, unstable=unstable, region=region,
                         winding=wind)


def _vandermonde(kappas, dim: int) -> np.ndarray:
    ks = np.asarray(kappas, dtype=complex)
    powers = np.arange(dim - 1, -1, -1)
    return ks[None, :] ** powers[:, None]


@dataclass(frozen=True)
class StableBasis:
    """Stable characteristic roots at z with their Vandermonde eigenvectors
    (columns of `vectors`, component order u_{j+p-1}..u_{j-r})."""

    z: complex
    kappas: tuple
    vectors: np.ndarray


def stable_basis(scheme: SchemeDefinition, z: complex,
                 unit_tol: float = 1e-8) -> StableBasis:
    split = spectral_split(scheme, z, unit_tol)
    if split.region not in ("outside", "at_one"):
        raise MultiplicityError(
            f"stable basis requested at z={z!r} in region {split.region!r}; "
            "the stable root count is only pinned outside the symbol curve")
    ks = np.asarray(split.stable)
    if ks.size >= 2:
        gap = min(abs(ks[i] - ks[j])
                  for i in range(ks.size) for j in range(i + 1, ks.size))
        if gap <= 1e-8:
            raise MultiplicityError(
                f"stable roots nearly collide at z={z!r}: gap {gap:.3e}")
    return StableBasis(z=complex(z), kappas=tuple(ks),
                       vectors=_vandermonde(ks, scheme.p + scheme.r))


@dataclass(frozen=True)
class LopatinskiiValue:
    """Delta(z) = det(B e_1(z), ..., B e_r(z)), stable roots sorted by
    (|kappa|, arg kappa)."""

    z: complex
    value: complex
    kappas: tuple


def _lopatinskii_from_roots(scheme: SchemeDefinition, kappas) -> complex:
    B = boundary_matrix(scheme)
    V = _vandermonde(kappas, scheme.p + scheme.r)
    return complex(np.linalg.det(B @ V))


def lopatinskii(scheme: SchemeDefinition, z: complex) -> LopatinskiiValue:
    basis = stable_basis(scheme, z)
    B = boundary_matrix(scheme)
    val = complex(np.linalg.det(B @ basis.vectors))
    return LopatinskiiValue(z=complex(z), value=val, kappas=basis.kappas)


def _track_roots(scheme: SchemeDefinition, z: complex,
                 refs: np.ndarray, gap: float) -> np.ndarray:
    """Match the roots at z to reference roots by nearest assignment."""
    roots = characteristic_roots(scheme, z)
    cost = np.abs(refs[:, None] - roots[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = roots[cols[np.argsort(rows)]]
    worst = float(np.max(np.abs(matched - refs)))
    if worst > gap / 3.0:
        raise RootSolveError(
            f"root tracking to z={z!r} moved a root by {worst:.3e}, more "
            f"than a third of the reference gap {gap:.3e}")
    return matched


def lopatinskii_derivative_at_one(scheme: SchemeDefinition,
                                  h0: float = 1e-3,
                                  rel_tol: float = 1e-6) -> complex:
    """Delta'(1) by central differences with root tracking and Richardson
    extrapolation.

    The stable family is continued analytically across z = 1 by nearest
    matching against the full root set at 1 (just left of 1 the central
    root dips inside the unit circle, so a modulus split would miscount);
    step halving stops when the extrapolated value settles to rel_tol.
    """
    split = spectral_split(scheme, 1.0)
    all_refs = np.asarray(split.roots)
    stable_idx = [i for i, k in enumerate(all_refs)
                  if any(abs(k - s) < 1e-12 for s in split.stable)]
    gaps = [abs(all_refs[i] - all_refs[j])
            for i in range(all_refs.size) for j in range(i + 1, all_refs.size)]
    gap = min(gaps) if gaps else math.inf
    if gap <= 1e-8:
        raise MultiplicityError(
            f"characteristic roots nearly collide at z=1: gap {gap:.3e}")

    def tracked_delta(z: complex) -> complex:
        matched = _track_roots(scheme, z, all_refs, gap)
        return _lopatinskii_from_roots(scheme, matched[stable_idx])

    h = h0
    prev = None
    estimate = None
    for _ in range(24):
        diff = (tracked_delta(1.0 + h) - tracked_delta(1.0 - h)) / (2.0 * h)
        if prev is not None:
            richardson = (4.0 * diff - prev) / 3.0
            if estimate is not None and \
                    abs(richardson - estimate) <= rel_tol * max(1.0, abs(richardson)):
                return complex(richardson)
            estimate = richardson
        prev = diff
        h *= 0.5
    raise RootSolveError(
        "derivative extrapolation at z=1 did not settle; last estimate "
        f"{estimate!r}")


@dataclass(frozen=True)
class ProjectorSet:
    """Spectral projectors of the companion matrix through its eigenbasis.

    Classes: "ss" strictly stable roots, "c" central (unit circle), "su"
    strictly unstable.  `e` is the source injection vector (first companion
    coordinate); at z = 1 the central eigenvector is the all-ones vector and
    pi_c e = (l_c . e) * ones with l_c the matching row of V^{-1}.
    """

    z: complex
    roots: tuple
    V: np.ndarray
    Vinv: np.ndarray
    classes: dict
    pi_ss: np.ndarray
    pi_c: np.ndarray
    pi_su: np.ndarray
    central: complex | None
    central_vector: np.ndarray | None
    left_central: np.ndarray | None
    e: np.ndarray

    def power_apply(self, n: int, vec: np.ndarray,
                    which: str | None = None) -> np.ndarray:
        """M(z)^n vec through the eigenbasis, optionally restricted to one
        spectral class; n may be negative when the class avoids zero."""
        coeffs = self.Vinv @ np.asarray(vec, dtype=complex)
        lam = np.asarray(self.roots)
        mask = np.zeros(lam.size, dtype=bool)
        if which is None:
            mask[:] = True
        else:
            mask[list(self.classes[which])] = True
        out = np.zeros(self.V.shape[0], dtype=complex)
        for k in np.nonzero(mask)[0]:
            out += coeffs[k] * lam[k] ** n * self.V[:, k]
        return out


def projector_set(scheme: SchemeDefinition, z: complex,
                  unit_tol: float = 1e-8) -> ProjectorSet:
    split = spectral_split(scheme, z, unit_tol)
    roots = np.asarray(split.roots)
    d = scheme.p + scheme.r
    V = _vandermonde(roots, d)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > 1e10:
        raise EigenConditioningError(
            f"eigenvector Vandermonde at z={z!r} has condition {cond:.3e}")
    Vinv = np.linalg.inv(V)
    mods = np.abs(roots)
    idx_ss = tuple(int(i) for i in np.nonzero(mods < 1.0 - unit_tol)[0])
    idx_c = tuple(int(i) for i in np.nonzero(np.abs(mods - 1.0) <= unit_tol)[0])
    idx_su = tuple(int(i) for i in np.nonzero(mods > 1.0 + unit_tol)[0])
    classes = {"ss": idx_ss, "c": idx_c, "su": idx_su}

    def proj(idx):
        mask = np.zeros(d)
        for i in idx:
            mask[i] = 1.0
        return V @ (mask[:, None] * Vinv)

    pi_ss, pi_c, pi_su = proj(idx_ss), proj(idx_c), proj(idx_su)
    eye = np.eye(d)
    M = companion_matrix(scheme, z)
    for name, P, idx in (("ss", pi_ss, idx_ss), ("c", pi_c, idx_c),
                         ("su", pi_su, idx_su)):
        if np.max(np.abs(P @ P - P)) > 1e-10:
            raise EigenConditioningError(f"projector {name} not idempotent")
        if np.max(np.abs(P @ M - M @ P)) > 1e-10:
            raise EigenConditioningError(f"projector {name} does not commute")
        if abs(np.trace(P).real - len(idx)) > 1e-10 or \
                abs(np.trace(P).imag) > 1e-10:
            raise EigenConditioningError(f"projector {name} has wrong rank")
    if np.max(np.abs(pi_ss + pi_c + pi_su - eye)) > 1e-10:
        raise EigenConditioningError("projectors do not sum to the identity")

    central = central_vec = left_central = None
    if idx_c:
        near_one = min(idx_c, key=lambda i: abs(roots[i] - 1.0))
        central = complex(roots[near_one])
        central_vec = V[:, near_one].copy()
        left_central = Vinv[near_one, :].copy()
    e = np.zeros(d)
    e[0] = 1.0
    return ProjectorSet(z=complex(z), roots=tuple(roots), V=V, Vinv=Vinv,
                        classes=classes, pi_ss=pi_ss, pi_c=pi_c, pi_su=pi_su,
                        central=central, central_vector=central_vec,
                        left_central=left_central, e=e)


def residue_condition(scheme: SchemeDefinition, tol: float = 1e-10) -> bool:
    """Whether B(ones) lies in the span of the stable boundary traces at 1.

    ones is the central Vandermonde vector at kappa = 1; when B(ones) = 0
    the condition holds degenerately and the reflected boundary layer
    vanishes identically.
    """
    B = boundary_matrix(scheme)
    ones = np.ones(scheme.p + scheme.r)
    target = B @ ones
    tnorm = float(np.linalg.norm(target))
    if tnorm == 0.0:
        return True
    basis = stable_basis(scheme, 1.0)
    A = B @ basis.vectors
    # span membership through an explicit rank cutoff: a trace column of
    # roundoff size (Delta(1) = 0 within floats) must count as zero, or a
    # 1x1 "solve" would invert it and report everything as in-span
    U, sv, _ = np.linalg.svd(A)
    scale = max(1.0, float(np.max(np.abs(B))))
    Uk = U[:, sv > 1e-10 * scale]
    resid = float(np.linalg.norm(target - Uk @ (Uk.conj().T @ target)))
    return resid <= tol * tnorm


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the Lopatinskii condition sweep on annuli around the
    unit circle, plus the boundary-layer dichotomy at z = 1."""

    satisfied: bool
    min_modulus: float
    witness_z: complex | None
    delta_at_one: complex
    boundary_zero: bool
    residue_ok: bool | None
    verdict: str
    radii: tuple
    samples_per_radius: int

    def as_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "min_modulus": self.min_modulus,
            "witness_z": None if self.witness_z is None else
                [self.witness_z.real, self.witness_z.imag],
            "delta_at_one": [self.delta_at_one.real, self.delta_at_one.imag],
            "boundary_zero": self.boundary_zero,
            "residue_ok": self.residue_ok,
            "verdict": self.verdict,
            "radii": list(self.radii),
            "samples_per_radius": self.samples_per_radius,
        }


def check_hypothesis_two(scheme: SchemeDefinition, annulus_samples: int = 64,
                         radii=(1.0, 1.05, 1.25, 2.5),
                         zero_tol: float = 1e-6,
                         exclusion: float = 0.06) -> StabilityReport:
    """Sweep |Delta(z)| over circles of the given radii and classify.

    On the unit radius an angular window |theta| < exclusion is skipped:
    the symbol curve touches z = 1 there and a marginal boundary zero of
    Delta would otherwise shadow the sweep.  A modulus below zero_tol
    anywhere else is a genuine Lopatinskii violation.  When the sweep is
    clean the verdict follows the z = 1 dichotomy: a boundary zero with a
    nonvanishing residue gives the marginal verdict, anything else is
    uniformly stable.
    """
    if annulus_samples < 8:
        raise ValueError("need at least 8 samples per radius")
    min_mod = math.inf
    witness = None
    for rho in radii:
        thetas = np.linspace(0.0, 2.0 * np.pi, annulus_samples, endpoint=False)
        for th in thetas:
            signed = math.remainder(th, 2.0 * math.pi)
            if abs(rho - 1.0) < 1e-12 and abs(signed) < exclusion:
                continue
            zval = rho * complex(math.cos(th), math.sin(th))
            val = abs(lopatinskii(scheme, zval).value)
            if val < min_mod:
                min_mod = val
                if val < zero_tol:
                    witness = zval
    satisfied = witness is None

    one = stable_basis(scheme, 1.0)
    B = boundary_matrix(scheme)
    delta1 = complex(np.linalg.det(B @ one.vectors))
    boundary_zero = abs(delta1) < 1e-8
    residue_ok = residue_condition(scheme) if boundary_zero else None

    if not satisfied:
        verdict = (f"unstable: Lopatinskii determinant vanishes at "
                   f"z = {witness.real:.6g}{witness.imag:+.6g}j")
    elif boundary_zero and not residue_ok:
        verdict = "ℓ¹-stable, ℓ^q-unstable for q>1"
    else:
        verdict = "ℓ^q-stable for all q"
    return StabilityReport(satisfied=satisfied, min_modulus=float(min_mod),
                           witness_z=witness, delta_at_one=delta1,
                           boundary_zero=boundary_zero, residue_ok=residue_ok,
                           verdict=verdict, radii=tuple(radii),
                           samples_per_radius=annulus_samples)
