"""Inequality chains as first-class results: terms, margins, tightness.

Each evaluator returns a ChainResult whose terms are listed left to right as
displayed. For chains whose middle term is a sup over unit vectors, the
bracket (lower, upper) is carried along and margins are formed on the sound
side only: the left inequality checks against the upper bound and the right
inequality against the lower bound, so a reported violation is a genuine
counterexample candidate rather than optimizer slack. The stricter
left <= lower check is reported separately as ``sufficient_left``.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import as_matrix, frobenius, symmetrize
from .errors import DimensionMismatchError, FunctionFlagError, MapSpecError
from .funcalc import matrix_segment_integral, power, psi_from_function
from .maps import CongruenceMap, PositiveMap, SummedFamily
from .numrange import numerical_radius, sup_convex_over_joint_range
from .spectral import abs_operator, apply_function, eigvalsh, operator_norm

CHAIN_IDS = (
    "EQUIV",
    "KITTANEH",
    "THM_MAIN",
    "COR_POWER_R",
    "THM_PHI_SUP",
    "PROP_PHI_OPCONVEX",
    "MULTI_OP",
    "MULTI_OP_NORMAL",
    "TWO_OP_SUP",
    "TWO_OP_OPCONVEX",
)

DEFAULT_TOL_SCALE = 1e-9


@dataclass(frozen=True)
class ChainResult:
    """One evaluated inequality chain.

    margins[i] = terms[i+1] - terms[i], except around a sup bracket where the
    sound bound replaces the displayed middle estimate (see module docstring).
    tightness[i] = terms[i] / terms[i+1] with 0/0 reported as 1.
    """

    chain_id: str
    terms: tuple
    margins: tuple
    holds: bool
    tightness: tuple
    tol_used: float
    sup_bracket: Optional[tuple] = None
    sufficient_left: Optional[bool] = None

    def as_dict(self):
        return {
            "chain_id": self.chain_id,
            "terms": list(self.terms),
            "margins": list(self.margins),
            "holds": self.holds,
            "tightness": list(self.tightness),
            "tol_used": self.tol_used,
            "sup_bracket": list(self.sup_bracket) if self.sup_bracket else None,
            "sufficient_left": self.sufficient_left,
        }


def _ratio(num, den):
    if den == 0.0:
        return 1.0 if num == 0.0 else math.inf
    return num / den


def _finish(chain_id, terms, tol_scale, sup_bracket=None):
    terms = tuple(float(t) for t in terms)
    if not all(math.isfinite(t) for t in terms):
        raise ValueError(f"{chain_id}: non-finite term in {terms}")
    extent = [abs(t) for t in terms]
    if sup_bracket is not None:
        extent.extend(abs(v) for v in sup_bracket)
    tol = tol_scale * max(1.0, max(extent))
    if sup_bracket is None:
        margins = tuple(terms[i + 1] - terms[i] for i in range(len(terms) - 1))
        sufficient_left = None
    else:
        lower, upper = sup_bracket
        margins = (upper - terms[0], terms[2] - lower)
        sufficient_left = bool(lower - terms[0] >= -tol)
    holds = bool(min(margins) >= -tol)
    tightness = tuple(_ratio(terms[i], terms[i + 1]) for i in range(len(terms) - 1))
    return ChainResult(
        chain_id=chain_id,
        terms=terms,
        margins=margins,
        holds=holds,
        tightness=tightness,
        tol_used=float(tol),
        sup_bracket=tuple(float(v) for v in sup_bracket) if sup_bracket else None,
        sufficient_left=sufficient_left,
    )


def _herm_norm(h):
    evals = eigvalsh(h)
    return float(max(abs(evals[0]), abs(evals[-1])))


def _gram_pair(a):
    # |A|^2 = A*A and |A*|^2 = AA*, exact Hermitian products.
    a = np.asarray(a)
    return a.conj().T @ a, a @ a.conj().T


def _require_flags(fn, *, op_convex):
    if op_convex:
        if not (fn.increasing and fn.operator_convex):
            raise FunctionFlagError(
                f"{fn.label()} must be increasing and operator convex"
            )
    else:
        if not (fn.increasing and fn.convex):
            raise FunctionFlagError(f"{fn.label()} must be increasing and convex")


def chain_equiv(a, tol_scale=DEFAULT_TOL_SCALE, grid_n=256):
    """||A||/2 <= w(A) <= ||A||."""
    a = as_matrix(a)
    nrm = operator_norm(a)
    w = numerical_radius(a, grid_n).value
    return _finish("EQUIV", (0.5 * nrm, w, nrm), tol_scale)


def chain_kittaneh(a, tol_scale=DEFAULT_TOL_SCALE, grid_n=256):
    """w(A)^2 <= (1/2) || |A|^2 + |A*|^2 ||."""
    a = as_matrix(a)
    gram, cogram = _gram_pair(a)
    w = numerical_radius(a, grid_n).value
    return _finish("KITTANEH", (w * w, 0.5 * _herm_norm(gram + cogram)), tol_scale)


def chain_thm_main(
    a, fn, tol_scale=DEFAULT_TOL_SCALE, grid_n=256, rule=None, chain_id="THM_MAIN"
):
    """f(w(A)) <= || int f(t|A| + (1-t)|A*|) dt || <= (1/2) || f(|A|) + f(|A*|) ||
    for increasing operator convex f."""
    _require_flags(fn, op_convex=True)
    a = as_matrix(a)
    abs_a = abs_operator(a)
    abs_astar = abs_operator(a.conj().T)
    left = fn.eval(numerical_radius(a, grid_n).value)
    middle = _herm_norm(matrix_segment_integral(fn, abs_a, abs_astar, rule))
    right = 0.5 * _herm_norm(apply_function(abs_a, fn) + apply_function(abs_astar, fn))
    return _finish(chain_id, (left, middle, right), tol_scale)


def chain_power_r(a, r, tol_scale=DEFAULT_TOL_SCALE, grid_n=256, rule=None):
    """The power-function instance with 1 <= r <= 2."""
    r = float(r)
    if not 1.0 <= r <= 2.0:
        raise FunctionFlagError(f"power exponent must lie in [1, 2], got {r}")
    return chain_thm_main(
        a, power(r), tol_scale, grid_n, rule, chain_id="COR_POWER_R"
    )


def chain_thm_phi_sup(
    a,
    fn,
    phi,
    tol_scale=DEFAULT_TOL_SCALE,
    grid_n=256,
    directions=720,
    chain_id="THM_PHI_SUP",
):
    """f(w(phi(A))^2) <= sup_x int f(<phi(t|A|^2 + (1-t)|A*|^2) x, x>) dt
    <= (1/2) || phi(f(|A|^2) + f(|A*|^2)) || for increasing convex f and a
    unital positive phi."""
    _require_flags(fn, op_convex=False)
    a = as_matrix(a)
    gram, cogram = _gram_pair(a)
    image = phi.apply(a)
    left = fn.eval(numerical_radius(image, grid_n).value ** 2)
    p = symmetrize(phi.apply(gram))
    q = symmetrize(phi.apply(cogram))
    sweep = sup_convex_over_joint_range(p, q, psi_from_function(fn), directions)
    right = 0.5 * _herm_norm(
        symmetrize(phi.apply(apply_function(gram, fn) + apply_function(cogram, fn)))
    )
    return _finish(
        chain_id,
        (left, sweep.lower, right),
        tol_scale,
        sup_bracket=(sweep.lower, sweep.upper),
    )


def chain_prop_phi_opconvex(
    a, fn, phi, tol_scale=DEFAULT_TOL_SCALE, grid_n=256, rule=None
):
    """f(w(phi(A))^2) <= || phi(int f(t|A|^2 + (1-t)|A*|^2) dt) ||
    <= (1/2) || phi(f(|A|^2) + f(|A*|^2)) || for increasing operator convex f;
    the middle term is exact, no sup needed."""
    _require_flags(fn, op_convex=True)
    a = as_matrix(a)
    gram, cogram = _gram_pair(a)
    image = phi.apply(a)
    left = fn.eval(numerical_radius(image, grid_n).value ** 2)
    seg = matrix_segment_integral(fn, symmetrize(gram), symmetrize(cogram), rule)
    middle = _herm_norm(symmetrize(phi.apply(seg)))
    right = 0.5 * _herm_norm(
        symmetrize(phi.apply(apply_function(gram, fn) + apply_function(cogram, fn)))
    )
    return _finish("PROP_PHI_OPCONVEX", (left, middle, right), tol_scale)


def _as_family(items):
    comps = []
    ops = []
    for op, a_i in items:
        a_i = as_matrix(a_i)
        if isinstance(op, PositiveMap):
            comp = op
        else:
            comp = CongruenceMap(np.asarray(op, dtype=np.complex128))
        if comp.input_dim != a_i.shape[0]:
            raise DimensionMismatchError(
                (comp.input_dim, comp.input_dim), a_i.shape, op="family item"
            )
        comps.append(comp)
        ops.append(a_i)
    return SummedFamily(comps), ops


def chain_multi_op(
    items,
    fn,
    normal=False,
    tol_scale=DEFAULT_TOL_SCALE,
    grid_n=256,
    directions=720,
):
    """Family version over operators A_i and maps (or contractions) phi_i with
    sum_i phi_i(I) = I: the direct-sum operator and the summing family map
    reduce it to the single-operator sup chain. The normal variant replaces
    the left term by f(|| sum_i phi_i(A_i) ||^2), valid when every A_i is
    normal."""
    if not items:
        raise MapSpecError("multi-operator chain needs at least one item")
    family, ops = _as_family(items)
    if normal:
        for idx, a_i in enumerate(ops):
            dev = frobenius(a_i @ a_i.conj().T - a_i.conj().T @ a_i)
            if dev > 1e-10 * max(1.0, frobenius(a_i) ** 2):
                raise MapSpecError(
                    f"item {idx} is not normal: commutator norm {dev:.3e}"
                )
    total = sum(c.input_dim for c in family.components)
    big = np.zeros((total, total), dtype=np.complex128)
    r = 0
    for a_i in ops:
        big[r : r + a_i.shape[0], r : r + a_i.shape[0]] = a_i
        r += a_i.shape[0]
    result = chain_thm_phi_sup(
        big, fn, family, tol_scale, grid_n, directions, chain_id="MULTI_OP"
    )
    if not normal:
        return result
    summed = family.apply(big)
    left = fn.eval(operator_norm(summed) ** 2)
    terms = (left,) + result.terms[1:]
    redone = _finish(
        "MULTI_OP_NORMAL", terms, tol_scale, sup_bracket=result.sup_bracket
    )
    return redone


def chain_two_op_sup(
    a, b, fn, tol_scale=DEFAULT_TOL_SCALE, grid_n=256, directions=720
):
    """f(w(B*A)) <= sup_x int f(<(t|A|^2 + (1-t)|B|^2) x, x>) dt
    <= (1/2) || f(|A|^2) + f(|B|^2) || for increasing convex f."""
    _require_flags(fn, op_convex=False)
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(a.shape, b.shape, op="two-operator chain")
    gram_a = a.conj().T @ a
    gram_b = b.conj().T @ b
    left = fn.eval(numerical_radius(b.conj().T @ a, grid_n).value)
    sweep = sup_convex_over_joint_range(
        symmetrize(gram_a), symmetrize(gram_b), psi_from_function(fn), directions
    )
    right = 0.5 * _herm_norm(apply_function(gram_a, fn) + apply_function(gram_b, fn))
    return _finish(
        "TWO_OP_SUP",
        (left, sweep.lower, right),
        tol_scale,
        sup_bracket=(sweep.lower, sweep.upper),
    )


def chain_two_op_opconvex(
    a, b, fn, tol_scale=DEFAULT_TOL_SCALE, grid_n=256, rule=None
):
    """f(w(B*A)) <= || int f(t|A|^2 + (1-t)|B|^2) dt ||
    <= (1/2) || f(|A|^2) + f(|B|^2) || for increasing operator convex f."""
    _require_flags(fn, op_convex=True)
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(a.shape, b.shape, op="two-operator chain")
    gram_a = symmetrize(a.conj().T @ a)
    gram_b = symmetrize(b.conj().T @ b)
    left = fn.eval(numerical_radius(b.conj().T @ a, grid_n).value)
    middle = _herm_norm(matrix_segment_integral(fn, gram_a, gram_b, rule))
    right = 0.5 * _herm_norm(apply_function(gram_a, fn) + apply_function(gram_b, fn))
    return _finish("TWO_OP_OPCONVEX", (left, middle, right), tol_scale)


def _stats(values):
    arr = np.asarray(values, dtype=float)
    qs = np.quantile(arr, [0.25, 0.5, 0.75])
    return {
        "mean": float(arr.mean()),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "q25": float(qs[0]),
        "q50": float(qs[1]),
        "q75": float(qs[2]),
    }


def tightness_report(results):
    """Margin and ratio statistics over a homogeneous batch of chain results.

    For three-term chains the per-sample refinement of the middle term over
    the endpoint-average bound, (right - middle)/right, is averaged as
    ``refinement_middle_vs_right`` (0 where right = 0).
    """
    results = list(results)
    if not results:
        raise ValueError("tightness_report needs at least one result")
    chain_ids = {r.chain_id for r in results}
    if len(chain_ids) != 1:
        raise ValueError(f"tightness_report needs one chain_id, got {sorted(chain_ids)}")
    n_terms = len(results[0].terms)
    report = {
        "chain_id": results[0].chain_id,
        "samples": len(results),
        "holds_all": all(r.holds for r in results),
        "pairs": [],
    }
    for i in range(n_terms - 1):
        margins = [r.margins[i] for r in results]
        ratios = [r.tightness[i] for r in results if math.isfinite(r.tightness[i])]
        report["pairs"].append(
            {
                "index": i,
                "margin": _stats(margins),
                "ratio": _stats(ratios) if ratios else None,
            }
        )
    if n_terms >= 3:
        refinements = []
        for r in results:
            right = r.terms[-1]
            middle = r.terms[-2]
            refinements.append((right - middle) / right if right != 0.0 else 0.0)
        report["refinement_middle_vs_right"] = _stats(refinements)
    return report
