"""Random matrix ensembles and counter-based per-sample RNG derivation.

Each sample's generator is keyed by sha256(root, chain, ensemble, dim, index)
feeding a Philox counter-based bit generator, so the sample stream is
independent of evaluation order and thread count.
"""

import hashlib

import numpy as np

ENSEMBLES = (
    "ginibre",
    "hermitian",
    "psd",
    "normal",
    "unitary",
    "nilpotent_jordan",
    "shifted_jordan",
)

RNG_ALGORITHM = {
    "name": "philox4x64",
    "version": 1,
    "derivation": "sha256('radiuslab|1|' root '|' chain '|' ensemble '|' dim '|' index)[:16] -> key",
}


def _derive_digest(root_seed, chain_id, ensemble, dim, index):
    tag = f"radiuslab|1|{int(root_seed)}|{chain_id}|{ensemble}|{int(dim)}|{int(index)}"
    return hashlib.sha256(tag.encode("ascii")).digest()


def derive_key_hex(root_seed, chain_id, ensemble, dim, index):
    """Hex form of the 128-bit Philox key, as recorded in report rows."""
    return _derive_digest(root_seed, chain_id, ensemble, dim, index)[:16].hex()


def derive_rng(root_seed, chain_id, ensemble, dim, index):
    """Per-sample Generator; identical inputs give identical streams."""
    digest = _derive_digest(root_seed, chain_id, ensemble, dim, index)
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def standard_complex_gaussian(rng, shape):
    """i.i.d. standard complex Gaussians (unit E|z|^2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng, n):
    """Haar unitary via QR of a Ginibre draw with the R-diagonal phase fixed."""
    g = standard_complex_gaussian(rng, (n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d = np.where(np.abs(d) == 0.0, 1.0, d)
    return q * (d / np.abs(d))


def haar_isometry(rng, n, k):
    """n x k matrix with orthonormal columns (k <= n)."""
    g = standard_complex_gaussian(rng, (n, k))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d = np.where(np.abs(d) == 0.0, 1.0, d)
    return q * (d / np.abs(d))


def jordan_block(n, lam=0.0):
    return np.eye(n, k=1, dtype=np.complex128) + lam * np.eye(n, dtype=np.complex128)


def gen_random(ensemble, n, rng):
    """Draw one n x n matrix from the named ensemble."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if ensemble == "ginibre":
        return standard_complex_gaussian(rng, (n, n))
    if ensemble == "hermitian":
        g = standard_complex_gaussian(rng, (n, n))
        return (g + g.conj().T) / 2.0
    if ensemble == "psd":
        g = standard_complex_gaussian(rng, (n, n))
        return g.conj().T @ g / n
    if ensemble == "normal":
        u = haar_unitary(rng, n)
        z = standard_complex_gaussian(rng, n)
        return (u * z) @ u.conj().T
    if ensemble == "unitary":
        return haar_unitary(rng, n)
    if ensemble == "nilpotent_jordan":
        return jordan_block(n)
    if ensemble == "shifted_jordan":
        lam = complex(standard_complex_gaussian(rng, (1,))[0])
        return jordan_block(n, lam)
    raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
