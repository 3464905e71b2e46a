"""Half-line and whole-line evolution, Green's functions, norms, growth probes.

The half-line operator T acts on sequences (u_j)_{j >= 1-r} whose ghost
values u_j, j in {1-r..0}, satisfy the boundary extrapolation; one step is
the interior stencil update followed by a ghost refill from the new interior.
The whole-line operator L is the same stencil as a convolution on Z.  The
temporal Green's functions are the iterates of the Dirac masses,

    G(n, j0, .) = T^n delta_{j0},      Gt(n, .) = L^n delta_0,

and they carry the exact finite-support bound j - j0 in {-np, ..., nr}
(support spreads p cells left and r cells right per step).  Norms are the
l^q norms over the interior j >= 1 only; growth probes evolve the flat data
u_J = sum_{j0 <= J} delta_{j0} and record ||T^n u_J|| / ||u_J||, a lower
bound for the operator norm of T^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .scheme import SchemeDefinition

__all__ = [
    "HalfLineField", "WholeLineField", "GreenField", "GhostConsistencyError",
    "apply_half_line", "apply_whole_line", "temporal_green",
    "temporal_green_whole", "hq_norm", "growth_experiment", "GrowthResult",
    "loglog_slope",
]


class GhostConsistencyError(ValueError):
    """Input field's ghost values do not satisfy the boundary extrapolation."""


@dataclass(frozen=True)
class HalfLineField:
    """Finitely supported sequence on j >= 1-r; values[idx] = u_{idx+1-r}.

    The first r entries are the ghost values u_{1-r}, ..., u_0 in that
    order; entries beyond the stored window are implicit zeros.
    """

    r: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.ascontiguousarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.size < self.r + 1:
            raise ValueError("field must store the ghosts and at least u_1")

    @property
    def j_min(self) -> int:
        return 1 - self.r

    @property
    def j_max(self) -> int:
        return self.values.size - self.r

    def value(self, j: int) -> float:
        if j < 1 - self.r:
            raise IndexError(f"index {j} below the domain start {1 - self.r}")
        idx = j + self.r - 1
        if idx >= self.values.size:
            return 0.0
        return float(self.values[idx])

    @property
    def interior(self) -> np.ndarray:
        """The values (u_j)_{j >= 1} of the stored window."""
        return self.values[self.r:]

    def trimmed(self) -> "HalfLineField":
        """Drop trailing exact zeros (values are exact linear combinations,
        so the support boundary is exact; no epsilon trimming)."""
        nz = np.nonzero(self.values)[0]
        hi = (int(nz[-1]) + 1) if nz.size else 0
        hi = max(hi, self.r + 1)
        return HalfLineField(self.r, self.values[:hi])

    @classmethod
    def dirac(cls, scheme: SchemeDefinition, j0: int, j_top: int | None = None):
        """Interior delta at j0 with the ghosts the boundary rule induces."""
        if j0 < 1:
            raise ValueError("source index must satisfy j0 >= 1")
        top = j0 if j_top is None else max(j_top, j0)
        vals = np.zeros(top + scheme.r)
        vals[j0 + scheme.r - 1] = 1.0
        if j0 <= scheme.p_b:
            for i in range(scheme.r):
                vals[scheme.r - 1 - i] = scheme.b[i, j0 - 1]
        return cls(scheme.r, vals)


@dataclass(frozen=True)
class WholeLineField:
    """Finitely supported sequence on Z; values[idx] = u_{j_min+idx}."""

    j_min: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.ascontiguousarray(self.values, dtype=float))

    @property
    def j_max(self) -> int:
        return self.j_min + self.values.size - 1

    def value(self, j: int) -> float:
        idx = j - self.j_min
        if idx < 0 or idx >= self.values.size:
            return 0.0
        return float(self.values[idx])

    @classmethod
    def dirac(cls, j0: int = 0):
        return cls(j0, np.array([1.0]))


@dataclass(frozen=True)
class GreenField:
    """A temporal Green's function snapshot T^n delta_{j0} or L^n delta_0;
    j0 is None for the whole-line kernel (source at 0)."""

    n: int
    j0: int | None
    field: HalfLineField | WholeLineField

    def value(self, j: int) -> float:
        return self.field.value(j)


def _check_ghosts(scheme: SchemeDefinition, field: HalfLineField,
                  tol: float = 1e-10):
    scale = max(1.0, float(np.max(np.abs(field.values))) if field.values.size else 1.0)
    r = scheme.r
    for i in range(r):
        want = 0.0
        for k in range(1, scheme.p_b + 1):
            if r - 1 + k < field.values.size:
                want += scheme.b[i, k - 1] * field.values[r - 1 + k]
        got = field.values[r - 1 - i]
        if abs(got - want) > tol * scale:
            raise GhostConsistencyError(
                f"ghost value at j={-i} is {got!r}, boundary rule gives "
                f"{want!r} (tolerance {tol:g} of scale {scale:g})")


def _half_buffer(scheme: SchemeDefinition, field: HalfLineField,
                 nsteps: int) -> np.ndarray:
    # Top p cells are forced to zero by the kernel; size the buffer so the
    # support (growing <= r cells rightward per step) never reaches them.
    top = field.j_max + scheme.r * nsteps + scheme.p
    buf = np.zeros(top + scheme.r)
    buf[:field.values.size] = field.values
    return buf


def apply_half_line(scheme: SchemeDefinition, field: HalfLineField,
                    nsteps: int = 1, ghost_tol: float = 1e-10) -> HalfLineField:
    """Advance nsteps interior updates, refilling ghosts from each new
    interior.  The input ghosts must satisfy the boundary rule within
    ghost_tol of the field's sup scale; internally ghosts are recomputed,
    never trusted."""
    if field.r != scheme.r:
        raise ValueError("field and scheme have different ghost widths")
    if nsteps < 0:
        raise ValueError("nsteps must be >= 0")
    _check_ghosts(scheme, field, ghost_tol)
    if nsteps == 0:
        return field
    buf = _half_buffer(scheme, field, nsteps)
    out = _kernels.evolve_half(buf, scheme.a, scheme.b, scheme.r, scheme.p,
                               scheme.p_b, nsteps)
    return HalfLineField(scheme.r, out).trimmed()


def apply_whole_line(scheme: SchemeDefinition, field: WholeLineField,
                     nsteps: int = 1) -> WholeLineField:
    """Advance the convolution update; window widens by [-p, +r] per step."""
    if nsteps < 0:
        raise ValueError("nsteps must be >= 0")
    if nsteps == 0:
        return field
    r, p = scheme.r, scheme.p
    lo = field.j_min - p * nsteps - r
    hi = field.j_max + r * nsteps + p
    buf = np.zeros(hi - lo + 1)
    start = field.j_min - lo
    buf[start:start + field.values.size] = field.values
    out = _kernels.evolve_whole(buf, scheme.a, r, p, nsteps)
    return WholeLineField(lo, out)


def temporal_green(scheme: SchemeDefinition, n: int, j0: int) -> GreenField:
    """G(n, j0, .) = T^n delta_{j0}."""
    if n < 0:
        raise ValueError("time index must be >= 0")
    start = HalfLineField.dirac(scheme, j0)
    return GreenField(n, j0, apply_half_line(scheme, start, n))


def temporal_green_whole(scheme: SchemeDefinition, n: int) -> GreenField:
    """Gt(n, .) = L^n delta_0."""
    if n < 0:
        raise ValueError("time index must be >= 0")
    return GreenField(n, None, apply_whole_line(scheme, WholeLineField.dirac(0), n))


def _interior_lq(values: np.ndarray, q: float) -> float:
    if q == math.inf:
        return float(np.max(np.abs(values))) if values.size else 0.0
    return math.fsum(np.abs(values) ** q) ** (1.0 / q)


def hq_norm(field, q: float) -> float:
    """l^q norm over the interior j >= 1 (whole-line fields: over all of Z).

    Uses compensated summation throughout; q = inf gives the sup norm.
    """
    if q < 1:
        raise ValueError("norm exponent must satisfy q >= 1")
    if isinstance(field, GreenField):
        field = field.field
    if isinstance(field, HalfLineField):
        return _interior_lq(field.interior, q)
    if isinstance(field, WholeLineField):
        return _interior_lq(field.values, q)
    raise TypeError(f"cannot take a norm of {type(field).__name__}")


@dataclass(frozen=True)
class GrowthResult:
    """Operator-norm lower bounds ||T^n u_J|| / ||u_J|| on a (J, n) grid."""

    q: float
    ns: np.ndarray
    ratios: dict
    max_ratio: np.ndarray

    @property
    def rows(self):
        """Flat (J, n, ratio) triples, J-major then n-ascending."""
        out = []
        for J in sorted(self.ratios):
            for n, val in zip(self.ns, self.ratios[J]):
                out.append((J, int(n), float(val)))
        return out


def growth_experiment(scheme: SchemeDefinition, q: float, J_list,
                      n_max: int, record=None) -> GrowthResult:
    """Evolve u_J = sum_{j0=1}^{J} delta_{j0} and record the norm ratios.

    The ratios lower-bound the operator norm of T^n on the j >= 1 space;
    they are never claimed as the exact norm.
    """
    if n_max < 1:
        raise ValueError("time horizon must be >= 1")
    if not J_list:
        raise ValueError("J list must be nonempty")
    if q < 1:
        raise ValueError("norm exponent must satisfy q >= 1")
    ns = np.arange(1, n_max + 1) if record is None else \
        np.asarray(sorted(set(int(n) for n in record)), dtype=int)
    if ns.size == 0 or ns[0] < 1 or ns[-1] > n_max:
        raise ValueError("recording times must lie in 1..n_max")
    r, p = scheme.r, scheme.p
    ratios = {}
    for J in J_list:
        J = int(J)
        start = HalfLineField(r, np.concatenate([np.zeros(r), np.ones(J)]))
        denom = hq_norm(start, q)
        buf = _half_buffer(scheme, start, n_max)
        vals = np.empty(ns.size)
        pos = 0
        n_done = 0
        for n_rec in ns:
            buf = _kernels.evolve_half(buf, scheme.a, scheme.b, r, p,
                                       scheme.p_b, int(n_rec) - n_done)
            n_done = int(n_rec)
            vals[pos] = _interior_lq(buf[r:], q) / denom
            pos += 1
        ratios[J] = vals
    max_ratio = np.max(np.stack([ratios[int(J)] for J in J_list]), axis=0)
    return GrowthResult(q=q, ns=ns, ratios=ratios, max_ratio=max_ratio)


def loglog_slope(ns, vals, n_lo: int, n_hi: int) -> float:
    """Least-squares slope of log(vals) against log(ns) on [n_lo, n_hi]."""
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(vals, dtype=float)
    mask = (ns >= n_lo) & (ns <= n_hi) & (vals > 0)
    if np.count_nonzero(mask) < 2:
        raise ValueError("need at least two positive samples in the fit window")
    x = np.log(ns[mask])
    y = np.log(vals[mask])
    A = np.stack([x, np.ones_like(x)], axis=1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(sol[0])
