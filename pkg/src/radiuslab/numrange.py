"""Numerical radius and the sup-over-unit-vectors search.

w(A) is computed through the rotation identity
    w(A) = max_theta lambda_max((e^{i theta} A + e^{-i theta} A*) / 2):
h(theta) is evaluated on a uniform grid over [0, 2pi) and polished by
golden-section refinement around the best cell. h is Lipschitz with constant
at most ||A||, so the grid alone certifies an error of ||A|| * pi / grid_n.

The sup of a convex objective over {(<Px,x>, <Qx,x>) : ||x|| = 1} exploits
that this joint numerical range is a convex planar set: a convex objective
attains its maximum at an extreme point, and extreme points are supporting
points realized by top eigenvectors of cos(phi) P + sin(phi) Q. Sweeping phi
and polishing with projected gradient ascent yields a certified lower bound;
the integrand-wise bound int f(lambda_max(tP + (1-t)Q)) dt caps it from above.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .core import as_matrix, assert_hermitian
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    DomainError,
    FunctionFlagError,
    NotUnitVectorError,
)
from .funcalc import _adaptive_integral
from .spectral import (
    CLAMP_RTOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
    eigh,
    eigh_batch,
    eigvalsh,
    operator_norm,
)

UNIT_NORM_ATOL = 1e-12
GOLDEN_BRACKET_WIDTH = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RadiusResult:
    """Numerical radius estimate with its certificates.

    ``certified_error`` is the a-priori Lipschitz grid bound ||A|| pi / N,
    which stays valid after refinement (the estimate only increases);
    ``refine_width`` is the width of the final golden-section bracket
    around ``theta_star``.
    """

    value: float
    theta_star: float
    grid_points: int
    certified_error: float
    refine_width: float


@dataclass(frozen=True)
class SupSweepResult:
    """Bracket for a sup-over-unit-vectors term.

    ``lower`` is attained by ``witness`` (a guaranteed lower bound);
    ``upper`` is the integrand-wise bound, sound for checking any inequality
    whose left side must not exceed the sup.
    """

    lower: float
    upper: float
    witness: np.ndarray
    directions: int


def _h_values(a, thetas):
    ok, vals = backend.radius_h_values(
        a, np.asarray(thetas, dtype=np.float64), JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    if not ok:
        raise ConvergenceError("Jacobi sweeps exhausted inside the radius sweep")
    return vals


def numerical_radius(a, grid_n=256):
    """Numerical radius w(A) via the theta sweep with golden-section polish."""
    a = as_matrix(a)
    if grid_n < 16:
        raise ValueError(f"grid_n must be >= 16, got {grid_n}")
    norm_a = operator_norm(a)
    if norm_a == 0.0:
        return RadiusResult(0.0, 0.0, grid_n, 0.0, 0.0)

    def h(theta):
        return float(_h_values(a, [theta])[0])

    thetas = 2.0 * math.pi * np.arange(grid_n) / grid_n
    grid_vals = _h_values(a, thetas)
    best_idx = int(np.argmax(grid_vals))  # first maximum: lexicographic tie-break
    best_val = float(grid_vals[best_idx])
    best_theta = float(thetas[best_idx])

    delta = 2.0 * math.pi / grid_n
    lo = best_theta - delta
    hi = best_theta + delta
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = h(x1)
    f2 = h(x2)
    for cand, val in ((x1, f1), (x2, f2)):
        if val > best_val:
            best_val = val
            best_theta = cand
    while hi - lo > GOLDEN_BRACKET_WIDTH:
        if f1 < f2:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = h(x2)
            if f2 > best_val:
                best_val, best_theta = f2, x2
        else:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = h(x1)
            if f1 > best_val:
                best_val, best_theta = f1, x1
    return RadiusResult(
        value=float(best_val),
        theta_star=float(best_theta % (2.0 * math.pi)),
        grid_points=int(grid_n),
        certified_error=float(norm_a * math.pi / grid_n),
        refine_width=float(hi - lo),
    )


def _require_unit(x, name="x"):
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    nrm = float(np.linalg.norm(x))
    if abs(nrm - 1.0) > UNIT_NORM_ATOL:
        raise NotUnitVectorError(f"{name} has norm {nrm!r}, expected 1")
    return x


def rayleigh(m, x):
    """<Mx, x> for a unit vector x."""
    m = as_matrix(m)
    x = _require_unit(x)
    if m.shape[0] != x.shape[0]:
        raise DimensionMismatchError(m.shape, x.shape, op="rayleigh")
    return complex(np.vdot(x, m @ x))


def _clamped_form(m, x, scale):
    raw = float(np.real(np.vdot(x, m @ x)))
    if raw < -CLAMP_RTOL * max(1.0, scale):
        raise DomainError(f"quadratic form {raw:.6e} is negative beyond roundoff")
    return max(raw, 0.0)


def _ascend(objective, p, q, scale_p, scale_q, x0, g0, max_iters=200):
    # Projected gradient ascent on the unit sphere with step halving.
    x, gx = x0, g0
    for _ in range(max_iters):
        a = _clamped_form(p, x, scale_p)
        b = _clamped_form(q, x, scale_q)
        da, db = objective.grad(a, b)
        grad = 2.0 * (da * (p @ x) + db * (q @ x))
        grad = grad - np.vdot(x, grad) * x
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= 1e-14 * max(1.0, abs(gx)):
            break
        step = 1.0 / max(1.0, gnorm)
        improved = False
        while step > 1e-18:
            xn = x + step * grad
            xn = xn / np.linalg.norm(xn)
            gn = objective.value(
                _clamped_form(p, xn, scale_p), _clamped_form(q, xn, scale_q)
            )
            if gn > gx:
                x, gx = xn, gn
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x, gx


def sup_convex_over_joint_range(p, q, objective, directions=720):
    """Bracket sup_{||x||=1} psi(<Px,x>, <Qx,x>) for PSD P, Q and convex
    nondecreasing psi.

    Candidates are the top eigenvectors (all within 1e-10 of the largest
    eigenvalue) of cos(phi) P + sin(phi) Q over a uniform phi grid, plus every
    eigenvector of P and of Q; the best few seed a projected-gradient polish.
    """
    if not (getattr(objective, "convex", False) and getattr(objective, "increasing", False)):
        raise FunctionFlagError(
            "objective must carry convex and increasing flags for the sup sweep"
        )
    p = assert_hermitian(p)
    q = assert_hermitian(q)
    if p.shape != q.shape:
        raise DimensionMismatchError(p.shape, q.shape, op="sup sweep")

    evals_p = eigvalsh(p)
    evals_q = eigvalsh(q)
    scale_p = float(np.max(np.abs(evals_p)))
    scale_q = float(np.max(np.abs(evals_q)))
    for name, evs, scale in (("P", evals_p, scale_p), ("Q", evals_q, scale_q)):
        if float(evs[0]) < -CLAMP_RTOL * max(1.0, scale):
            raise DomainError(f"{name} is not PSD: lambda_min = {float(evs[0]):.6e}")

    phis = 2.0 * math.pi * np.arange(directions) / directions
    stack = (
        np.cos(phis)[:, None, None] * p[None] + np.sin(phis)[:, None, None] * q[None]
    )
    dir_evals, dir_vecs = eigh_batch(stack, True)
    candidates = []
    for k in range(directions):
        row = dir_evals[k]
        top = float(row.max())
        cutoff = top - 1e-10 * max(1.0, abs(top))
        for j in np.flatnonzero(row >= cutoff):
            candidates.append(dir_vecs[k, :, j])
    for m in (p, q):
        _, vecs = eigh(m)
        for j in range(vecs.shape[1]):
            candidates.append(vecs[:, j].copy())

    cand = np.stack(candidates)
    form_p = np.real(np.einsum("ij,jk,ik->i", cand.conj(), p, cand))
    form_q = np.real(np.einsum("ij,jk,ik->i", cand.conj(), q, cand))
    if float(form_p.min()) < -CLAMP_RTOL * max(1.0, scale_p) or float(
        form_q.min()
    ) < -CLAMP_RTOL * max(1.0, scale_q):
        raise DomainError("negative quadratic form beyond roundoff in sweep")
    scores = objective.value_array(form_p, form_q)
    order = np.argsort(-scores, kind="stable")[:3]
    best_x = candidates[int(order[0])]
    best_val = float(
        objective.value(
            _clamped_form(p, best_x, scale_p), _clamped_form(q, best_x, scale_q)
        )
    )
    for idx in order:
        x0 = candidates[int(idx)]
        g0 = objective.value(
            _clamped_form(p, x0, scale_p), _clamped_form(q, x0, scale_q)
        )
        x_fin, g_fin = _ascend(objective, p, q, scale_p, scale_q, x0, g0)
        if g_fin > best_val:
            best_val, best_x = g_fin, x_fin

    fn = objective.fn

    def upper_integrand(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        stack = ts[:, None, None] * p[None] + (1.0 - ts)[:, None, None] * q[None]
        evals, _ = eigh_batch(stack, False)
        return fn.eval_array(np.maximum(evals.max(axis=1), 0.0))

    upper = float(_adaptive_integral(upper_integrand, objective.rule))
    return SupSweepResult(
        lower=float(best_val),
        upper=upper,
        witness=best_x,
        directions=int(directions),
    )
