"""Scheme definitions, symbols, and first-hypothesis checks.

A scheme is the data (r, p, a, p_b, b) of the interior update

    u^{n+1}_j = sum_{k=-r}^{p} a_k u^n_{j+k},   j >= 1,

together with the boundary extrapolation u_j = sum_{k=1}^{p_b} b_{k,j} u_k
for the ghost indices j in {1-r, ..., 0}.  The symbol of the interior update
is the Laurent polynomial

    F(kappa) = sum_{k=-r}^{p} a_k kappa^k,

whose unit-circle values trace the essential spectrum of both the half-line
and the whole-line operators.  The first hypothesis on a scheme bundles
consistency F(1) = 1, dissipativity |F(e^{it})| < 1 for t != 0, and the local
expansion

    F(e^{it}) = exp(-i alpha t - beta t^{2 mu} + o(t^{2 mu})),

with drift alpha = -F'(1) in ]-p, 0[ and Re(beta) > 0.  The coefficients of
that expansion are extracted exactly from the polynomial derivatives of F at
1; sampling covers the circle away from t = 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "SchemeDefinition", "HypothesisReport", "symbol_eval",
    "check_hypothesis_one", "boundary_matrix", "builtin_lfr", "builtin_o3",
    "scheme_to_json", "scheme_from_json",
]


@dataclass(frozen=True)
class SchemeDefinition:
    """Interior and boundary coefficients of a half-line scheme.

    a is indexed from -r to p and stored with a[0] = a_{-r}.  b has one row
    per ghost index, row i holding the coefficients (b_{1,j}, ..., b_{p_b,j})
    for ghost j = -i (so row 0 is the ghost closest to the interior).  lam
    (Courant number) and v (velocity) are metadata: every computation reads
    the drift from the symbol, never from lam * v.
    """

    r: int
    p: int
    a: np.ndarray
    p_b: int
    b: np.ndarray
    lam: float = 1.0
    v: float = -1.0
    name: str = "custom"

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(self.r, -1) if np.size(self.b) \
            else np.zeros((self.r, 0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.r < 1 or self.p < 1:
            raise ValueError("stencil widths must satisfy r >= 1 and p >= 1")
        if a.shape != (self.p + self.r + 1,):
            raise ValueError(
                f"need {self.p + self.r + 1} interior coefficients, got {a.shape}")
        if a[0] == 0.0 or a[-1] == 0.0:
            raise ValueError("edge coefficients a_{-r} and a_p must be nonzero")
        if not (0 <= self.p_b <= self.p):
            raise ValueError("boundary width must satisfy 0 <= p_b <= p")
        if b.shape != (self.r, self.p_b):
            raise ValueError(f"boundary matrix must be {self.r} x {self.p_b}")

    def coeff(self, k: int) -> float:
        """Interior coefficient a_k for k in -r..p."""
        if not -self.r <= k <= self.p:
            raise IndexError(f"coefficient index {k} outside [-{self.r}, {self.p}]")
        return float(self.a[k + self.r])

    def ghost_coeffs(self, j: int) -> np.ndarray:
        """Boundary coefficients (b_{1,j}, ..., b_{p_b,j}) for ghost index j."""
        if not 1 - self.r <= j <= 0:
            raise IndexError(f"ghost index {j} outside [{1 - self.r}, 0]")
        return self.b[-j]


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the first-hypothesis check.

    series holds the Taylor coefficients d_1..d_order of log F(e^{it}), so a
    passing scheme has d_1 = -i*alpha, d_m ~ 0 for 1 < m < 2*mu, and
    d_{2 mu} = -beta.
    """

    alpha: float
    mu: int
    beta: complex
    consistency_residual: float
    dissipativity_margin: float
    series: np.ndarray
    satisfied: bool
    failure: str | None = None
    witness_t: float | None = None

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "mu": self.mu,
            "beta": [self.beta.real, self.beta.imag],
            "consistency_residual": self.consistency_residual,
            "dissipativity_margin": self.dissipativity_margin,
            "satisfied": self.satisfied,
            "failure": self.failure,
            "witness_t": self.witness_t,
        }


def symbol_eval(scheme: SchemeDefinition, kappa):
    """Evaluate F(kappa) = sum a_k kappa^k; kappa may be a scalar or array.

    Horner evaluation of kappa^r F(kappa), divided back by kappa^r.
    """
    kappa = np.asarray(kappa, dtype=complex)
    if np.any(kappa == 0):
        raise ValueError("symbol is a Laurent polynomial; kappa = 0 not allowed")
    out = np.zeros_like(kappa)
    for c in scheme.a[::-1]:
        out = out * kappa + c
    out = out * kappa ** (-scheme.r)
    if out.ndim == 0:
        return complex(out)
    return out


def _log_symbol_series(scheme: SchemeDefinition, order: int) -> np.ndarray:
    """Taylor coefficients d_1..d_order of t -> log F(e^{it}) at t = 0.

    F(e^{it}) = sum_m c_m t^m with c_m = sum_k a_k (ik)^m / m!, then
    log(1 + (F-1)) is composed as a truncated power series.  All sums are
    polynomially exact up to float rounding; no sampling is involved.
    """
    ks = np.arange(-scheme.r, scheme.p + 1)
    c = np.empty(order + 1, dtype=complex)
    for m in range(order + 1):
        c[m] = np.sum(scheme.a * (1j * ks) ** m) / math.factorial(m)
    # log(1+x) = x - x^2/2 + x^3/3 - ...; x = c_1 t + c_2 t^2 + ...
    x = c.copy()
    x[0] = 0.0
    d = np.zeros(order + 1, dtype=complex)
    term = np.zeros(order + 1, dtype=complex)
    term[0] = 1.0  # running power x^m, truncated
    for m in range(1, order + 1):
        # term <- term * x, truncated at `order`
        new = np.zeros(order + 1, dtype=complex)
        for i in range(order + 1):
            if term[i] == 0.0:
                continue
            hi = order - i
            new[i:i + hi + 1] += term[i] * x[:hi + 1]
        term = new
        d += ((-1) ** (m + 1) / m) * term
    return d[1:]


def check_hypothesis_one(scheme: SchemeDefinition, order: int = 8,
                         grid_size: int = 100_000, tol: float = 1e-12,
                         beta_tol: float = 1e-8,
                         series_radius: float = 1e-2) -> HypothesisReport:
    """Check consistency, dissipativity, and the diffusivity expansion.

    The expansion coefficients come from exact derivatives of F at 1 composed
    into the series of log F(e^{it}); |F(e^{it})| is sampled on grid_size
    uniform points with |t| <= series_radius excluded (the series controls
    that neighborhood, where the sampled margin would degenerate to 0).
    """
    if order < 2:
        raise ValueError("series order must be at least 2")
    if grid_size < 1000:
        raise ValueError("dissipativity grid must have at least 1000 points")

    f1 = complex(symbol_eval(scheme, 1.0))
    consistency = abs(f1 - 1.0)
    d = _log_symbol_series(scheme, order)
    alpha = float((1j * d[0]).real)

    def failed(reason, witness=None, mu=0, beta=0j, margin=math.nan):
        return HypothesisReport(alpha=alpha, mu=mu, beta=beta,
                                consistency_residual=consistency,
                                dissipativity_margin=margin, series=d,
                                satisfied=False, failure=reason,
                                witness_t=witness)

    if consistency > tol:
        return failed("consistency: F(1) differs from 1 beyond tolerance")
    if abs((1j * d[0]).imag) > beta_tol:
        return failed("drift: linear series coefficient is not purely -i*alpha")
    if not -scheme.p < alpha < 0:
        return failed(f"drift alpha={alpha} outside ]-p, 0[")

    mu = 0
    beta = 0j
    for m in range(2, order + 1):
        if abs(d[m - 1]) > beta_tol:
            if m % 2 != 0:
                return failed(f"diffusivity: first nonvanishing order {m} is odd")
            mu = m // 2
            beta = -complex(d[m - 1])
            break
    if mu == 0:
        return failed("diffusivity: no nonvanishing coefficient up to requested order")
    if beta.real <= 0:
        return failed("diffusivity: Re(beta) <= 0")

    t = np.linspace(-math.pi, math.pi, grid_size, endpoint=False)
    t = t[np.abs(t) > series_radius]
    mod = np.abs(symbol_eval(scheme, np.exp(1j * t)))
    worst = int(np.argmax(mod))
    margin = float(1.0 - mod[worst])
    if margin <= 0.0:
        return failed("dissipativity: |F(e^{it})| reaches 1 off t = 0",
                      witness=float(t[worst]), mu=mu, beta=beta, margin=margin)

    return HypothesisReport(alpha=alpha, mu=mu, beta=beta,
                            consistency_residual=consistency,
                            dissipativity_margin=margin, series=d,
                            satisfied=True)


def boundary_matrix(scheme: SchemeDefinition) -> np.ndarray:
    """The r x (p+r) boundary matrix B acting on (u_p, ..., u_{1-r})^T.

    Row i encodes the ghost constraint for j = -i: coefficient 1 on u_j and
    -b_{k,j} on u_k for k = 1..p_b.  The right r x r block is the identity,
    so rank B = r always.
    """
    p, r = scheme.p, scheme.r
    B = np.zeros((r, p + r))
    for i in range(r):
        B[i, p + i] = 1.0             # column of u_{-i}
        for k in range(1, scheme.p_b + 1):
            B[i, p - k] = -scheme.b[i, k - 1]   # column of u_k
    return B


def builtin_lfr(alpha: float, D: float, b: float) -> SchemeDefinition:
    """Lax-Friedrichs-type three-point scheme with one extrapolation weight.

    Interior coefficients a_{-1} = (D+alpha)/2, a_0 = 1-D, a_1 = (D-alpha)/2;
    ghost value u_0 = b * u_1.  Requires alpha^2 < D < 1 and D != -alpha so
    the dissipativity window is open and the edge coefficients are nonzero.
    """
    if not alpha * alpha < D < 1.0:
        raise ValueError("need alpha^2 < D < 1")
    if D == -alpha:
        raise ValueError("D = -alpha makes the left edge coefficient vanish")
    a = np.array([(D + alpha) / 2.0, 1.0 - D, (D - alpha) / 2.0])
    return SchemeDefinition(r=1, p=1, a=a, p_b=1, b=np.array([[b]]),
                            lam=1.0, v=alpha, name="lfr")


def builtin_o3(alpha: float, b1: float, b2: float) -> SchemeDefinition:
    """Third-order upwind-biased four-point scheme with a two-point ghost rule.

    Interior coefficients are the cubic-interpolation weights
        a_{-1} = alpha(1+alpha)(2+alpha)/6,      a_0 = (1-alpha^2)(2+alpha)/2,
        a_1   = -alpha(1-alpha)(2+alpha)/2,      a_2 = alpha(1-alpha^2)/6,
    and the ghost value is u_0 = b1 u_1 + b2 u_2.  Requires alpha in ]-1, 0[.
    """
    if not -1.0 < alpha < 0.0:
        raise ValueError("need alpha in ]-1, 0[")
    a = np.array([
        alpha * (1 + alpha) * (2 + alpha) / 6.0,
        (1 - alpha ** 2) * (2 + alpha) / 2.0,
        -alpha * (1 - alpha) * (2 + alpha) / 2.0,
        alpha * (1 - alpha ** 2) / 6.0,
    ])
    return SchemeDefinition(r=1, p=2, a=a, p_b=2, b=np.array([[b1, b2]]),
                            lam=1.0, v=alpha, name="o3")


def _parse_number(x) -> float:
    """Accept JSON numbers plus exact decimal or rational strings."""
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        return float(Fraction(x))
    raise TypeError(f"cannot parse coefficient {x!r}")


def scheme_to_json(scheme: SchemeDefinition) -> str:
    doc = {
        "r": scheme.r,
        "p": scheme.p,
        "a": [repr(float(x)) for x in scheme.a],
        "p_b": scheme.p_b,
        "b": [[repr(float(x)) for x in row] for row in scheme.b],
        "lambda": scheme.lam,
        "v": scheme.v,
        "name": scheme.name,
    }
    return json.dumps(doc, indent=2)


def scheme_from_json(text: str) -> SchemeDefinition:
    """Parse a scheme document; coefficient entries may be numbers or exact
    decimal / rational strings such as "0.125" or "1/8"."""
    doc = json.loads(text)
    a = np.array([_parse_number(x) for x in doc["a"]])
    rows = doc.get("b", [])
    r = int(doc["r"])
    p_b = int(doc["p_b"])
    b = np.array([[_parse_number(x) for x in row] for row in rows]) \
        if rows else np.zeros((r, p_b))
    return SchemeDefinition(
        r=r, p=int(doc["p"]), a=a, p_b=p_b, b=b.reshape(r, p_b),
        lam=float(doc.get("lambda", 1.0)), v=float(doc.get("v", -1.0)),
        name=str(doc.get("name", "custom")))
