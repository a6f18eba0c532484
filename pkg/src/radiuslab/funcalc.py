"""Scalar function catalog, segment integrals, and the Hermite-Hadamard triple.

The catalog is closed: power(r >= 1), affine, exp_minus_one, and nonnegative
polynomials, each carrying verified monotonicity/convexity flags (t^r is
operator convex on [0, inf) exactly for 1 <= r <= 2). Segment integrals
int_0^1 f(t*a + (1-t)*b) dt use closed forms for polynomial kinds and
adaptive composite Gauss-Legendre otherwise; the matrix-valued version adds
an order-doubling agreement check.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import assert_hermitian, frobenius, symmetrize
from .errors import (
    DimensionMismatchError,
    DomainError,
    FunctionFlagError,
    QuadratureError,
)
from .spectral import CLAMP_RTOL, eigh_batch, lambda_extremes

EVAL_CLAMP_ABS = 1e-12
DEFAULT_ORDER = 32

# Order-doubled matrix quadrature must agree to this relative tolerance.
DOUBLING_RTOL = 1e-10

_KINDS = ("power", "affine", "exp_minus_one", "polynomial")


@dataclass(frozen=True)
class ScalarFunctionSpec:
    """A catalogued f: [0, inf) -> [0, inf) with declared shape flags."""

    kind: str
    params: tuple
    increasing: bool
    convex: bool
    operator_convex: bool

    domain_nonneg = True

    def _raw(self, ts):
        if self.kind == "power":
            return ts ** self.params[0]
        if self.kind == "affine":
            alpha, beta = self.params
            return alpha * ts + beta
        if self.kind == "exp_minus_one":
            return np.expm1(ts)
        coeffs = np.asarray(self.params, dtype=float)
        return np.polynomial.polynomial.polyval(ts, coeffs)

    def _raw_deriv(self, ts):
        if self.kind == "power":
            r = self.params[0]
            return r * ts ** (r - 1.0)
        if self.kind == "affine":
            return np.full_like(ts, self.params[0])
        if self.kind == "exp_minus_one":
            return np.exp(ts)
        coeffs = np.asarray(self.params, dtype=float)
        dcoeffs = np.polynomial.polynomial.polyder(coeffs)
        return np.polynomial.polynomial.polyval(ts, dcoeffs)

    @property
    def entire(self):
        """True when the formula extends to all of R (every kind except
        fractional powers); the declared flags still only hold on [0, inf)."""
        if self.kind == "power":
            return float(self.params[0]).is_integer()
        return True

    def eval_array(self, ts):
        """Pointwise values; arguments in [-1e-12, 0) clamp to 0, below raises."""
        ts = np.asarray(ts, dtype=float)
        low = float(ts.min()) if ts.size else 0.0
        if low < -EVAL_CLAMP_ABS:
            raise DomainError(
                f"argument {low:.6e} below the clamp threshold of a "
                "function on [0, inf)"
            )
        return self._raw(np.maximum(ts, 0.0))

    def eval_unrestricted(self, ts):
        """Raw formula values with no domain guard (for entire kinds only)."""
        return self._raw(np.asarray(ts, dtype=float))

    def eval(self, t):
        return float(self.eval_array(np.asarray([t], dtype=float))[0])

    def deriv_array(self, ts):
        ts = np.maximum(np.asarray(ts, dtype=float), 0.0)
        return self._raw_deriv(ts)

    def as_polynomial_coeffs(self):
        """Ascending coefficients when f is a polynomial, else None."""
        if self.kind == "polynomial":
            return list(self.params)
        if self.kind == "affine":
            alpha, beta = self.params
            return [beta, alpha]
        if self.kind == "power":
            r = self.params[0]
            if float(r).is_integer():
                k = int(r)
                return [0.0] * k + [1.0]
        return None

    def to_config(self):
        if self.kind == "power":
            return {"kind": "power", "r": self.params[0]}
        if self.kind == "affine":
            return {"kind": "affine", "alpha": self.params[0], "beta": self.params[1]}
        if self.kind == "exp_minus_one":
            return {"kind": "exp_minus_one"}
        return {"kind": "polynomial", "coeffs": list(self.params)}

    def label(self):
        if self.kind == "power":
            return f"power:{self.params[0]:g}"
        if self.kind == "affine":
            return f"affine:{self.params[0]:g}:{self.params[1]:g}"
        if self.kind == "exp_minus_one":
            return "exp_minus_one"
        return "poly:" + ",".join(f"{c:g}" for c in self.params)


def power(r):
    """f(t) = t^r for r >= 1; operator convex exactly when 1 <= r <= 2."""
    r = float(r)
    if not r >= 1.0:
        raise ValueError(f"power exponent must be >= 1, got {r}")
    return ScalarFunctionSpec(
        kind="power",
        params=(r,),
        increasing=True,
        convex=True,
        operator_convex=1.0 <= r <= 2.0,
    )


def affine(alpha, beta):
    """f(t) = alpha*t + beta with alpha, beta >= 0."""
    alpha = float(alpha)
    beta = float(beta)
    if alpha < 0.0 or beta < 0.0:
        raise ValueError("affine coefficients must be nonnegative")
    return ScalarFunctionSpec(
        kind="affine",
        params=(alpha, beta),
        increasing=True,
        convex=True,
        operator_convex=True,
    )


def exp_minus_one():
    """f(t) = e^t - 1: increasing and convex but not operator convex."""
    return ScalarFunctionSpec(
        kind="exp_minus_one",
        params=(),
        increasing=True,
        convex=True,
        operator_convex=False,
    )


def polynomial(coeffs):
    """Polynomial with nonnegative coefficients, ascending order."""
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    if any(c < 0.0 for c in coeffs):
        raise ValueError("polynomial coefficients must be nonnegative")
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    degree = len(coeffs) - 1
    return ScalarFunctionSpec(
        kind="polynomial",
        params=tuple(coeffs),
        increasing=True,
        convex=True,
        operator_convex=degree <= 2,
    )


def function_from_config(d):
    kind = d["kind"]
    if kind == "power":
        return power(d["r"])
    if kind == "affine":
        return affine(d["alpha"], d["beta"])
    if kind == "exp_minus_one":
        return exp_minus_one()
    if kind == "polynomial":
        return polynomial(d["coeffs"])
    raise ValueError(f"unknown function kind {kind!r}; expected one of {_KINDS}")


def parse_function(text):
    """CLI shorthand: power:2, affine:1:0.5, exp_minus_one, poly:0,0,1."""
    if isinstance(text, dict):
        return function_from_config(text)
    parts = str(text).split(":")
    name = parts[0]
    if name == "power":
        return power(float(parts[1]))
    if name == "affine":
        return affine(float(parts[1]), float(parts[2]))
    if name == "exp_minus_one":
        return exp_minus_one()
    if name in ("poly", "polynomial"):
        return polynomial([float(c) for c in parts[1].split(",")])
    raise ValueError(f"cannot parse function spec {text!r}")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes/weights mapped to (0, 1); exact to degree 2*order-1."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int


@lru_cache(maxsize=32)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(int(order))
    return QuadratureRule(nodes=(x + 1.0) / 2.0, weights=w / 2.0, order=int(order))


def _panel_sum(integrand, lo, hi, rule):
    ts = lo + (hi - lo) * rule.nodes
    vals = integrand(ts)
    return (hi - lo) * np.tensordot(rule.weights, vals, axes=(0, 0))


def _adaptive_integral(integrand, rule, rel_tol=1e-13, max_depth=48):
    """Composite Gauss-Legendre with panel bisection.

    ``integrand`` maps an array of parameters in [0, 1] to a stacked array of
    values (scalars or matrices, stacked on axis 0). Panels split until the
    whole-panel and two-half estimates agree to ``rel_tol`` relative to the
    integral's own scale; branch-point integrands (fractional powers of nearly
    singular operators) resolve in a handful of splits.
    """
    whole = _panel_sum(integrand, 0.0, 1.0, rule)
    scale = max(1.0, float(np.linalg.norm(np.ravel(whole))))
    total = np.zeros_like(whole)
    stack = [(0.0, 1.0, whole, 0)]
    while stack:
        lo, hi, estimate, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel_sum(integrand, lo, mid, rule)
        right = _panel_sum(integrand, mid, hi, rule)
        refined = left + right
        err = float(np.linalg.norm(np.ravel(refined - estimate)))
        if err <= rel_tol * scale:
            total = total + refined
        elif depth >= max_depth:
            raise QuadratureError(
                f"panel bisection stalled at depth {depth} "
                f"(panel [{lo:.3e}, {hi:.3e}], disagreement {err:.3e})",
                value_lo=estimate,
                value_hi=refined,
            )
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def _poly_segment(coeffs, a, b):
    # int_0^1 (t*a + (1-t)*b)^k dt = (sum_{j<=k} a^j b^(k-j)) / (k+1), exactly;
    # works elementwise on arrays.
    total = 0.0
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        h = sum(a**j * b ** (k - j) for j in range(k + 1))
        total = total + c * h / (k + 1)
    return total


def _clamp_nonneg(t):
    t = float(t)
    if t < -EVAL_CLAMP_ABS:
        raise DomainError(f"argument {t:.6e} below the clamp threshold")
    return max(t, 0.0)


def segment_integral_scalar(fn, a, b, rule=None):
    """int_0^1 f(t*a + (1-t)*b) dt; closed form for polynomial kinds."""
    a = _clamp_nonneg(a)
    b = _clamp_nonneg(b)
    coeffs = fn.as_polynomial_coeffs()
    if coeffs is not None:
        return float(_poly_segment(coeffs, a, b))
    rule = rule or gauss_legendre(DEFAULT_ORDER)
    return float(
        _adaptive_integral(lambda ts: fn.eval_array(ts * a + (1.0 - ts) * b), rule)
    )


def hh_scalar(fn, a, b, rule=None):
    """Hermite-Hadamard triple (f(midpoint), segment integral, endpoint average).

    For convex f the triple is nondecreasing; callers assert that ordering.
    """
    if not fn.convex:
        raise FunctionFlagError(f"{fn.label()} lacks the convex flag")
    a = _clamp_nonneg(a)
    b = _clamp_nonneg(b)
    mid = fn.eval((a + b) / 2.0)
    integral = segment_integral_scalar(fn, a, b, rule)
    endavg = (fn.eval(a) + fn.eval(b)) / 2.0
    return mid, integral, endavg


def _require_psd(h, name):
    lmin, lmax = lambda_extremes(h)
    scale = max(abs(lmin), abs(lmax))
    if lmin < -CLAMP_RTOL * max(1.0, scale):
        raise DomainError(f"{name} is not PSD: lambda_min = {lmin:.6e}")


def _matrix_poly(coeffs, m):
    # Horner evaluation of p(M) for Hermitian M.
    n = m.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    acc = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        acc = acc @ m + c * eye
    return acc


def matrix_segment_integral(fn, x, y, rule=None):
    """int_0^1 f(t*X + (1-t)*Y) dt for Hermitian PSD X, Y.

    Polynomial kinds evaluate exactly: degree <= 2 by the explicit forms
    (X + Y)/2 and (X^2 + Y^2)/3 + (XY + YX)/6, higher degrees by a
    Gauss-Legendre rule of sufficient order (exact for polynomials).
    Other kinds integrate adaptively and must pass the order-doubling
    agreement check at 1e-10 relative, else QuadratureError carries both
    values.
    """
    x = assert_hermitian(x)
    y = assert_hermitian(y)
    if x.shape != y.shape:
        raise DimensionMismatchError(x.shape, y.shape, op="segment integral")
    _require_psd(x, "X")
    _require_psd(y, "Y")

    coeffs = fn.as_polynomial_coeffs()
    if coeffs is not None:
        n = x.shape[0]
        eye = np.eye(n, dtype=np.complex128)
        if len(coeffs) <= 3:
            total = coeffs[0] * eye
            if len(coeffs) >= 2:
                total = total + coeffs[1] * (x + y) / 2.0
            if len(coeffs) == 3:
                total = total + coeffs[2] * (
                    (x @ x + y @ y) / 3.0 + (x @ y + y @ x) / 6.0
                )
            return total
        degree = len(coeffs) - 1
        base = rule or gauss_legendre(DEFAULT_ORDER)
        exact = gauss_legendre(max(base.order, (degree + 2) // 2))
        total = np.zeros_like(x)
        for t, w in zip(exact.nodes, exact.weights):
            total = total + w * _matrix_poly(coeffs, t * x + (1.0 - t) * y)
        return symmetrize(total)

    rule = rule or gauss_legendre(DEFAULT_ORDER)

    def integrand(ts):
        # quadrature nodes are Hermitian by construction (real scalars times
        # Hermitian operands), so the batched no-check solve applies
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        stack = ts[:, None, None] * x[None] + (1.0 - ts)[:, None, None] * y[None]
        evals, vecs = eigh_batch(stack, True)
        if fn.entire:
            fvals = fn.eval_unrestricted(evals)
        else:
            scale = np.max(np.abs(evals), axis=1)
            low = evals.min(axis=1)
            if np.any(low < -CLAMP_RTOL * scale):
                worst = float(low.min())
                raise DomainError(
                    f"integrand eigenvalue {worst:.6e} below the clamp window"
                )
            fvals = fn.eval_array(np.maximum(evals, 0.0))
        return np.matmul(vecs * fvals[:, None, :], np.conj(np.swapaxes(vecs, 1, 2)))

    value_lo = _adaptive_integral(integrand, rule)
    value_hi = _adaptive_integral(integrand, gauss_legendre(2 * rule.order))
    dev = frobenius(value_lo - value_hi)
    if dev > DOUBLING_RTOL * max(1.0, frobenius(value_hi)):
        raise QuadratureError(
            f"order-{rule.order} and order-{2 * rule.order} integrals "
            f"disagree by {dev:.3e}",
            value_lo=value_lo,
            value_hi=value_hi,
        )
    return symmetrize(value_hi)


@dataclass(frozen=True)
class SegmentObjective:
    """psi(a, b) = int_0^1 f(t*a + (1-t)*b) dt as a bivariate objective.

    Inherits joint convexity, per-argument monotonicity, and symmetry from
    the convex increasing f it was built with; carries f and the rule so sup
    searches can form the matching integrand-wise upper bound.
    """

    fn: ScalarFunctionSpec
    rule: QuadratureRule

    @property
    def convex(self):
        return self.fn.convex

    @property
    def increasing(self):
        return self.fn.increasing

    def value(self, a, b):
        return segment_integral_scalar(self.fn, a, b, self.rule)

    __call__ = value

    def value_array(self, a, b):
        """Vectorized values for candidate ranking (fixed rule, no adaptivity;
        the final reported bound re-evaluates through ``value``)."""
        a = np.maximum(np.asarray(a, dtype=float), 0.0)
        b = np.maximum(np.asarray(b, dtype=float), 0.0)
        coeffs = self.fn.as_polynomial_coeffs()
        if coeffs is not None:
            return np.asarray(_poly_segment(coeffs, a, b), dtype=float)
        ts = self.rule.nodes[:, None]
        vals = self.fn.eval_array(ts * a[None, :] + (1.0 - ts) * b[None, :])
        return self.rule.weights @ vals

    def grad(self, a, b):
        """(d/da, d/db) via differentiation under the integral sign."""
        a = max(float(a), 0.0)
        b = max(float(b), 0.0)
        ts = self.rule.nodes
        ws = self.rule.weights
        fprime = self.fn.deriv_array(ts * a + (1.0 - ts) * b)
        da = float(np.sum(ws * ts * fprime))
        db = float(np.sum(ws * (1.0 - ts) * fprime))
        return da, db


def psi_from_function(fn, rule=None):
    """Segment-integral objective for a convex increasing f."""
    if not (fn.convex and fn.increasing):
        raise FunctionFlagError(
            f"{fn.label()} must be convex and increasing to form the "
            "segment objective"
        )
    return SegmentObjective(fn=fn, rule=rule or gauss_legendre(DEFAULT_ORDER))
