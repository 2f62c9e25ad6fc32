"""Tensor-structured linear algebra on multipartite Hermitian matrices.

Subsystems of a k-partite space C^{n_1} x ... x C^{n_k} are labelled 1..k
throughout the package. Kept-index sets are arbitrary nonempty subsets of
{1, ..., k}; factors inside an output always follow ascending label order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SystemDims:
    """Ordered subsystem dimensions (n_1, ..., n_k) of a tensor factorization."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))
        if len(self.dims) < 1:
            raise ValueError("need at least one subsystem")
        if any(d < 1 for d in self.dims):
            raise ValueError(f"subsystem dimensions must be >= 1, got {self.dims}")

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def validate_keep(self, keep: Iterable[int]) -> tuple[int, ...]:
        """Normalize a kept-index set to a sorted tuple of 1-based labels."""
        j = sorted({int(i) for i in keep})
        if not j:
            raise ValueError("kept-index set must be nonempty")
        if j[0] < 1 or j[-1] > self.k:
            raise ValueError(f"kept indices {j} outside 1..{self.k}")
        return tuple(j)

    def complement(self, keep: Iterable[int]) -> tuple[int, ...]:
        j = set(self.validate_keep(keep))
        return tuple(i for i in range(1, self.k + 1) if i not in j)

    def subdim(self, labels: Iterable[int]) -> int:
        """Product of the dimensions of the given subsystem labels."""
        return int(np.prod([self.dims[i - 1] for i in labels], initial=1.0))

    def local_dims(self, labels: Iterable[int]) -> "SystemDims":
        return SystemDims(self.dims[i - 1] for i in sorted(set(labels)))


def as_dims(dims) -> SystemDims:
    if isinstance(dims, SystemDims):
        return dims
    if isinstance(dims, int):
        return SystemDims((dims,))
    return SystemDims(dims)


def hermitize(a: np.ndarray) -> np.ndarray:
    """(A + A*)/2; kills round-off drift accumulated through projection loops."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return (a + a.conj().T) / 2


def _as_square(a, what: str = "matrix") -> np.ndarray:
    m = np.asarray(getattr(a, "matrix", a), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    return m


class EigDecomposition(NamedTuple):
    values: np.ndarray   # real, sorted descending
    vectors: np.ndarray  # unitary, column i pairs with values[i]


def hermitian_eig(h) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Degenerate clusters keep the backend's ordering (stable sort); each
    eigenvector is phase-fixed so its largest-magnitude entry is real
    positive, which makes repeated runs reproducible.
    """
    m = hermitize(_as_square(h))
    values, vectors = np.linalg.eigh(m)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    anchors = np.argmax(np.abs(vectors), axis=0)
    for col, row in enumerate(anchors):
        pivot = vectors[row, col]
        if abs(pivot) > 0:
            vectors[:, col] *= pivot.conjugate() / abs(pivot)
    return EigDecomposition(values, vectors)


def numerical_rank(a) -> int:
    """Count of eigenvalues above 1e-10 * max(1, lambda_max)."""
    if isinstance(a, np.ndarray) and a.ndim == 1:
        values = np.sort(a)[::-1]
    else:
        values = hermitian_eig(a).values
    if len(values) == 0:
        return 0
    return int(np.sum(values > RANK_RTOL * max(1.0, float(values[0]))))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; realizes tensor products of subsystem operators."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out all subsystems not in `keep`.

    On product inputs returns the tensor factor over `keep` scaled by the
    traces of the discarded factors; kept factors stay in ascending label
    order.
    """
    dims = as_dims(dims)
    m = _as_square(rho)
    if m.shape[0] != dims.total:
        raise ValueError(f"matrix order {m.shape[0]} does not match dims {dims.dims}")
    j = dims.validate_keep(keep)
    keep0 = [i - 1 for i in j]
    k = dims.k
    t = m.reshape(*dims.dims, *dims.dims)
    in_labels = list(range(k)) + [k + i if i in keep0 else i for i in range(k)]
    out_labels = keep0 + [k + i for i in keep0]
    nj = dims.subdim(j)
    return np.einsum(t, in_labels, out_labels).reshape(nj, nj)


def subsystem_permutation(dims, keep) -> np.ndarray:
    """Permutation P with P (a_1 x ... x a_k) P^T = (x_{i not in J} a_i) x (x_{i in J} a_i).

    Factors of the complement come first, then the kept factors, each group
    in ascending label order.
    """
    dims = as_dims(dims)
    j = dims.validate_keep(keep)
    order = [i - 1 for i in dims.complement(j)] + [i - 1 for i in j]
    return _permutation_matrix(dims.dims, tuple(order))


@lru_cache(maxsize=256)
def _permutation_matrix(dims: tuple[int, ...], order: tuple[int, ...]) -> np.ndarray:
    n = int(np.prod(dims))
    new_dims = [dims[i] for i in order]
    p = np.zeros((n, n))
    for old in range(n):
        multi = np.unravel_index(old, dims)
        new = np.ravel_multi_index([multi[i] for i in order], new_dims)
        p[new, old] = 1.0
    p.setflags(write=False)
    return p


def swap_bipartite(m: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Reorder C^{n1} x C^{n2} -> C^{n2} x C^{n1}."""
    return np.ascontiguousarray(
        m.reshape(n1, n2, n1, n2).transpose(1, 0, 3, 2).reshape(n1 * n2, n1 * n2)
    )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD matrix of unit trace on a tensor-factored space."""

    matrix: np.ndarray
    dims: SystemDims = field(default=None)  # type: ignore[assignment]

    def __init__(self, matrix, dims=None):
        m = hermitize(_as_square(matrix, "density matrix"))
        d = as_dims(dims) if dims is not None else SystemDims((m.shape[0],))
        if m.shape[0] != d.total:
            raise ValueError(f"matrix order {m.shape[0]} does not match dims {d.dims}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace must be 1 within {TRACE_ATOL}, got {tr}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_ATOL:
            raise ValueError(f"matrix is not PSD: min eigenvalue {lo}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", d)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype) if dtype else np.array(self.matrix)

    def spectrum(self) -> np.ndarray:
        return hermitian_eig(self.matrix).values


def density_input(rho, what: str = "density matrix") -> np.ndarray:
    """Validate a DensityMatrix-or-array argument, returning the Hermitized array."""
    if isinstance(rho, DensityMatrix):
        return np.array(rho.matrix)
    m = hermitize(_as_square(rho, what))
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"{what}: trace must be 1 within {TRACE_ATOL}, got {tr}")
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < -PSD_ATOL:
        raise ValueError(f"{what}: not PSD, min eigenvalue {lo}")
    return m


def as_spectrum(values, *, probability: bool = False, atol: float = TRACE_ATOL) -> np.ndarray:
    """Canonicalize a real spectrum to descending order.

    With probability=True the entries must be nonnegative and sum to 1
    within `atol` (prescribed-eigenvalue use).
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 1:
        raise ValueError("spectrum must be nonempty")
    v = np.sort(v)[::-1]
    if probability:
        if v[-1] < -PSD_ATOL:
            raise ValueError(f"spectrum entries must be >= 0, got {v[-1]}")
        s = float(v.sum())
        if abs(s - 1.0) > atol:
            raise ValueError(f"spectrum must sum to 1 within {atol}, got {s}")
        v = np.clip(v, 0.0, None)
    return v


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    # Ginibre + QR; rescaling by the phases of R's diagonal gives Haar measure.
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _random_probvec(rng: np.random.Generator, n: int) -> np.ndarray:
    # Normalized i.i.d. exponentials: flat Dirichlet on the simplex.
    p = rng.standard_exponential(n)
    p /= p.sum()
    return np.sort(p)[::-1]


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary; deterministic for a given seed."""
    if n < 1:
        raise ValueError("order must be >= 1")
    return _haar_unitary(np.random.default_rng(seed), n)


def random_probability_vector(n: int, seed: int) -> np.ndarray:
    """Random probability vector, sorted descending; deterministic for a given seed."""
    if n < 1:
        raise ValueError("length must be >= 1")
    return _random_probvec(np.random.default_rng(seed), n)


def random_density(dims, seed: int) -> DensityMatrix:
    """U diag(p) U* with Haar U and flat-Dirichlet p."""
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    n = dims.total
    u = _haar_unitary(rng, n)
    p = _random_probvec(rng, n)
    return DensityMatrix(hermitize((u * p) @ u.conj().T), dims)
