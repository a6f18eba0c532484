"""Unital positive linear maps, applied structurally, plus the classical
inequality margins they satisfy (Choi-Davis, Kadison, inner Jensen, mixed
Schwarz).

Maps are represented declaratively (pinch blocks, an isometry, a unitary, ...)
rather than as dense super-operators: unitality is then exact by construction
and direct sums stay cheap. Every catalog constructor verifies unitality at
build time; positivity is spot-checked separately (`spot_check_positivity`).
No complete positivity is asserted anywhere - the transpose map is the
standard witness that plain positivity is all we use.
"""

import numpy as np

from . import ensembles
from .core import (
    as_matrix,
    assert_hermitian,
    frobenius,
    matrix_from_json_dict,
    matrix_to_json_dict,
    symmetrize,
)
from .errors import DimensionMismatchError, FunctionFlagError, MapSpecError
from .numrange import _clamped_form, _require_unit
from .spectral import abs_operator, apply_function, eigvalsh

UNITAL_RTOL = 1e-12
ISOMETRY_RTOL = 1e-12
WEIGHT_ATOL = 1e-14
PARTITION_RTOL = 1e-12

CATALOG_VARIANTS = (
    "identity",
    "pinch",
    "compress",
    "trace_state",
    "transpose",
    "unitary_conj",
    "mixture",
    "direct_sum",
)


def _rect_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def _rect_from_json(d):
    if "n" in d and "rows" not in d:  # square matrix wire format also accepted
        rows = cols = int(d["n"])
    else:
        rows, cols = int(d["rows"]), int(d["cols"])
    flat = np.array([complex(re, im) for re, im in d["data"]], dtype=np.complex128)
    return flat.reshape(rows, cols)


class PositiveMap:
    """Base class; subclasses implement `_apply` on a validated square input."""

    variant = "abstract"

    def __init__(self, input_dim, output_dim):
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)

    def apply(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.input_dim, self.input_dim):
            raise DimensionMismatchError(
                x.shape, (self.input_dim, self.input_dim), op=f"{self.variant} map"
            )
        return self._apply(x)

    def _apply(self, x):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError

    def _check_unital(self):
        image = self.apply(np.eye(self.input_dim, dtype=np.complex128))
        dev = frobenius(image - np.eye(self.output_dim))
        tol = UNITAL_RTOL * max(1.0, np.sqrt(self.output_dim))
        if dev > tol:
            raise MapSpecError(
                f"{self.variant} map is not unital: ||phi(I) - I||_F = {dev:.3e}"
            )

    def __repr__(self):
        return f"<{type(self).__name__} {self.input_dim}->{self.output_dim}>"


class IdentityMap(PositiveMap):
    variant = "identity"

    def __init__(self, n):
        super().__init__(n, n)

    def _apply(self, x):
        return x.copy()

    def to_config(self):
        return {"variant": "identity", "n": self.input_dim}


class Pinching(PositiveMap):
    """Zero the off-diagonal blocks of the given block partition."""

    variant = "pinch"

    def __init__(self, blocks):
        blocks = [int(b) for b in blocks]
        if not blocks or any(b < 1 for b in blocks):
            raise MapSpecError(f"pinch blocks must be positive, got {blocks}")
        n = sum(blocks)
        super().__init__(n, n)
        self.blocks = blocks
        mask = np.zeros((n, n), dtype=bool)
        start = 0
        for b in blocks:
            mask[start : start + b, start : start + b] = True
            start += b
        self._mask = mask
        self._check_unital()

    def _apply(self, x):
        out = np.zeros_like(x)
        out[self._mask] = x[self._mask]
        return out

    def to_config(self):
        return {"variant": "pinch", "blocks": list(self.blocks)}


class Compression(PositiveMap):
    """X -> V* X V for an isometry-columns V (V*V = I)."""

    variant = "compress"

    def __init__(self, v):
        v = np.asarray(v, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] < v.shape[1]:
            raise MapSpecError(f"compress needs a tall n x k matrix, got {v.shape}")
        k = v.shape[1]
        dev = frobenius(v.conj().T @ v - np.eye(k))
        if dev > ISOMETRY_RTOL * max(1.0, np.sqrt(k)):
            raise MapSpecError(f"compress columns not orthonormal: dev {dev:.3e}")
        super().__init__(v.shape[0], k)
        self.v = v
        self._check_unital()

    def _apply(self, x):
        return self.v.conj().T @ x @ self.v

    def to_config(self):
        return {"variant": "compress", "V": _rect_to_json(self.v)}


class TraceState(PositiveMap):
    """X -> (tr X / n) I."""

    variant = "trace_state"

    def __init__(self, n):
        super().__init__(n, n)
        self._check_unital()

    def _apply(self, x):
        return (np.trace(x) / self.input_dim) * np.eye(
            self.input_dim, dtype=np.complex128
        )

    def to_config(self):
        return {"variant": "trace_state", "n": self.input_dim}


class Transpose(PositiveMap):
    """X -> X^T: positive and unital, famously not completely positive."""

    variant = "transpose"

    def __init__(self, n):
        super().__init__(n, n)
        self._check_unital()

    def _apply(self, x):
        return x.T.copy()

    def to_config(self):
        return {"variant": "transpose", "n": self.input_dim}


class UnitaryConjugation(PositiveMap):
    """X -> U* X U."""

    variant = "unitary_conj"

    def __init__(self, u):
        u = as_matrix(u)
        n = u.shape[0]
        dev = frobenius(u.conj().T @ u - np.eye(n))
        if dev > ISOMETRY_RTOL * max(1.0, np.sqrt(n)):
            raise MapSpecError(f"unitary_conj matrix not unitary: dev {dev:.3e}")
        super().__init__(n, n)
        self.u = u
        self._check_unital()

    def _apply(self, x):
        return self.u.conj().T @ x @ self.u

    def to_config(self):
        return {"variant": "unitary_conj", "U": matrix_to_json_dict(self.u)}


class Mixture(PositiveMap):
    """Convex combination of maps with common dimensions."""

    variant = "mixture"

    def __init__(self, components, weights):
        if not components:
            raise MapSpecError("mixture needs at least one component")
        weights = [float(w) for w in weights]
        if len(weights) != len(components):
            raise MapSpecError("mixture weights and components differ in length")
        if any(w < 0.0 for w in weights):
            raise MapSpecError(f"mixture weights must be nonnegative, got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_ATOL:
            raise MapSpecError(f"mixture weights sum to {sum(weights)!r}, expected 1")
        dims = {(c.input_dim, c.output_dim) for c in components}
        if len(dims) != 1:
            raise MapSpecError(f"mixture components disagree on dimensions: {dims}")
        (din, dout) = dims.pop()
        super().__init__(din, dout)
        self.components = list(components)
        self.weights = weights
        self._check_unital()

    def _apply(self, x):
        out = np.zeros((self.output_dim, self.output_dim), dtype=np.complex128)
        for w, comp in zip(self.weights, self.components):
            out += w * comp.apply(x)
        return out

    def to_config(self):
        return {
            "variant": "mixture",
            "components": [c.to_config() for c in self.components],
            "weights": list(self.weights),
        }


class DirectSum(PositiveMap):
    """Block map: pinch to the diagonal blocks, apply one component per block."""

    variant = "direct_sum"

    def __init__(self, components):
        if not components:
            raise MapSpecError("direct_sum needs at least one component")
        super().__init__(
            sum(c.input_dim for c in components),
            sum(c.output_dim for c in components),
        )
        self.components = list(components)
        self._check_unital()

    def _apply(self, x):
        out = np.zeros((self.output_dim, self.output_dim), dtype=np.complex128)
        r = 0
        c = 0
        for comp in self.components:
            blk = x[r : r + comp.input_dim, r : r + comp.input_dim]
            out[c : c + comp.output_dim, c : c + comp.output_dim] = comp.apply(blk)
            r += comp.input_dim
            c += comp.output_dim
        return out

    def to_config(self):
        return {
            "variant": "direct_sum",
            "components": [c.to_config() for c in self.components],
        }


class CongruenceMap(PositiveMap):
    """X -> P* X P for a contraction P; positive but not unital on its own.

    Building block for partition families where only the family sums to the
    identity, so no unitality check here.
    """

    variant = "congruence"

    def __init__(self, p):
        p = np.asarray(p, dtype=np.complex128)
        if p.ndim != 2:
            raise MapSpecError("congruence needs a matrix")
        super().__init__(p.shape[0], p.shape[1])
        self.p = p

    def _apply(self, x):
        return self.p.conj().T @ x @ self.p

    def to_config(self):
        return {"variant": "congruence", "P": _rect_to_json(self.p)}


class SummedFamily(PositiveMap):
    """(X_1 + ... acting blockwise) -> sum_i phi_i(X_ii).

    Input is the direct sum of the component input spaces; the family must
    satisfy the partition-of-identity condition sum_i phi_i(I) = I.
    """

    variant = "summed_family"

    def __init__(self, components):
        if not components:
            raise MapSpecError("summed_family needs at least one component")
        outs = {c.output_dim for c in components}
        if len(outs) != 1:
            raise MapSpecError(f"summed_family output dims disagree: {outs}")
        dout = outs.pop()
        super().__init__(sum(c.input_dim for c in components), dout)
        self.components = list(components)
        acc = np.zeros((dout, dout), dtype=np.complex128)
        for comp in components:
            acc += comp.apply(np.eye(comp.input_dim, dtype=np.complex128))
        dev = frobenius(acc - np.eye(dout))
        if dev > PARTITION_RTOL * max(1.0, np.sqrt(dout)):
            raise MapSpecError(
                f"family does not partition the identity: residual {dev:.3e}"
            )

    def _apply(self, x):
        out = np.zeros((self.output_dim, self.output_dim), dtype=np.complex128)
        r = 0
        for comp in self.components:
            blk = x[r : r + comp.input_dim, r : r + comp.input_dim]
            out += comp.apply(blk)
            r += comp.input_dim
        return out

    def to_config(self):
        return {
            "variant": "summed_family",
            "components": [c.to_config() for c in self.components],
        }


def map_from_config(d):
    variant = d["variant"]
    if variant == "identity":
        return IdentityMap(d["n"])
    if variant == "pinch":
        return Pinching(d["blocks"])
    if variant == "compress":
        return Compression(_rect_from_json(d["V"]))
    if variant == "trace_state":
        return TraceState(d["n"])
    if variant == "transpose":
        return Transpose(d["n"])
    if variant == "unitary_conj":
        return UnitaryConjugation(matrix_from_json_dict(d["U"]))
    if variant == "mixture":
        return Mixture([map_from_config(c) for c in d["components"]], d["weights"])
    if variant == "direct_sum":
        return DirectSum([map_from_config(c) for c in d["components"]])
    if variant == "congruence":
        return CongruenceMap(_rect_from_json(d["P"]))
    if variant == "summed_family":
        return SummedFamily([map_from_config(c) for c in d["components"]])
    raise MapSpecError(f"unknown map variant {variant!r}")


def apply_map(phi, x):
    """Apply a map to a square matrix; linear, Hermiticity-preserving."""
    return phi.apply(as_matrix(x))


def _random_blocks(rng, n):
    blocks = []
    left = n
    while left > 0:
        b = int(rng.integers(1, left + 1))
        blocks.append(b)
        left -= b
    return blocks


def _random_simple(rng, n):
    choice = rng.integers(0, 5)
    if choice == 0:
        return IdentityMap(n)
    if choice == 1:
        return TraceState(n)
    if choice == 2:
        return Transpose(n)
    if choice == 3:
        return UnitaryConjugation(ensembles.haar_unitary(rng, n))
    return Pinching(_random_blocks(rng, n))


def random_map(rng, n):
    """Draw a catalog map for dimension n, variant uniform over the catalog.

    Seed derivation is the caller's job: pass a per-sample Generator so the
    draw commutes with parallel evaluation order.
    """
    variant = CATALOG_VARIANTS[int(rng.integers(0, len(CATALOG_VARIANTS)))]
    if variant == "identity":
        return IdentityMap(n)
    if variant == "pinch":
        return Pinching(_random_blocks(rng, n))
    if variant == "compress":
        k = int(rng.integers(1, n + 1))
        return Compression(ensembles.haar_isometry(rng, n, k))
    if variant == "trace_state":
        return TraceState(n)
    if variant == "transpose":
        return Transpose(n)
    if variant == "unitary_conj":
        return UnitaryConjugation(ensembles.haar_unitary(rng, n))
    if variant == "mixture":
        k = int(rng.integers(2, 4))
        comps = [_random_simple(rng, n) for _ in range(k)]
        w = rng.random(k) + 0.1
        w = w / w.sum()
        return Mixture(comps, list(w))
    if n < 2:
        return IdentityMap(n)
    n1 = int(rng.integers(1, n))
    return DirectSum([_random_simple(rng, n1), _random_simple(rng, n - n1)])


def spot_check_positivity(phi, rng, samples=100):
    """Worst relative lambda_min of phi(X) over random PSD X (should be ~ -0)."""
    worst = 0.0
    for _ in range(samples):
        g = ensembles.standard_complex_gaussian(rng, (phi.input_dim, phi.input_dim))
        x = g.conj().T @ g / phi.input_dim
        image = symmetrize(phi.apply(x))
        lmin = float(eigvalsh(image)[0])
        scale = max(1.0, float(eigvalsh(x)[-1]))
        worst = min(worst, lmin / scale)
    return worst


def choi_davis_margin(phi, fn, h):
    """lambda_min(phi(f(H)) - f(phi(H))) for operator convex f and PSD H."""
    if not fn.operator_convex:
        raise FunctionFlagError(f"{fn.label()} lacks the operator_convex flag")
    h = assert_hermitian(h)
    lhs = symmetrize(phi.apply(apply_function(h, fn)))
    rhs = apply_function(symmetrize(phi.apply(h)), fn)
    return float(eigvalsh(lhs - rhs)[0])


def kadison_margin(phi, h):
    """lambda_min(phi(H^2) - phi(H)^2); valid for every Hermitian H."""
    h = assert_hermitian(h)
    image = symmetrize(phi.apply(h))
    diff = symmetrize(phi.apply(h @ h)) - image @ image
    return float(eigvalsh(symmetrize(diff))[0])


def jensen_inner_margin(phi, fn, h, x):
    """<phi(f(H))x, x> - f(<phi(H)x, x>) for convex f; unit vector x."""
    if not fn.convex:
        raise FunctionFlagError(f"{fn.label()} lacks the convex flag")
    h = assert_hermitian(h)
    x = _require_unit(x)
    image = symmetrize(phi.apply(h))
    scale = float(np.max(np.abs(eigvalsh(image)))) if image.size else 0.0
    inner = _clamped_form(image, x, scale)
    lifted = float(np.real(np.vdot(x, symmetrize(phi.apply(apply_function(h, fn))) @ x)))
    return lifted - fn.eval(inner)


def mixed_schwarz_margin(a, x, y):
    """sqrt(<|A|x,x> <|A*|y,y>) - |<Ax,y>| for unit vectors x, y."""
    a = as_matrix(a)
    x = _require_unit(x, "x")
    y = _require_unit(y, "y")
    abs_a = abs_operator(a)
    abs_astar = abs_operator(a.conj().T)
    scale = max(1.0, float(eigvalsh(abs_a)[-1]))
    qx = _clamped_form(abs_a, x, scale)
    qy = _clamped_form(abs_astar, y, scale)
    lhs = abs(complex(np.vdot(y, a @ x)))
    return float(np.sqrt(qx * qy) - lhs)
