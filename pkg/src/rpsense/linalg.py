"""Dense/sparse complex linear algebra used by the rest of the package.

Operators are plain ``numpy.ndarray`` or ``scipy.sparse`` matrices; nothing
here wraps them in custom classes.  The Hermitian eigensolver splits the
matrix into the connected components of its sparsity graph before calling
LAPACK, which turns the block-diagonal spin Hamiltonians of this package into
many tiny problems.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, NumericalError, ValidationError

MAX_DIM = 8**5
HERMITIAN_ATOL = 1e-12


def _shape(m):
    return tuple(np.shape(m))


def as_dense(m) -> np.ndarray:
    """Return ``m`` as a dense complex ndarray."""
    if sp.issparse(m):
        return m.toarray().astype(complex, copy=False)
    return np.asarray(m, dtype=complex)


def kron(a, b, max_dim: int = MAX_DIM):
    """Kronecker product with a guard on the result dimension.

    Sparse inputs give a CSR result, dense inputs a dense one.
    """
    ra, ca = _shape(a)
    rb, cb = _shape(b)
    if 0 in (ra, ca, rb, cb):
        raise ValidationError("kron operands must be non-empty")
    if max(ra * rb, ca * cb) > max_dim:
        raise CapacityError(
            f"kron result {ra * rb}x{ca * cb} exceeds maximum dimension {max_dim}"
        )
    if sp.issparse(a) or sp.issparse(b):
        return sp.kron(a, b, format="csr")
    return np.kron(a, b)


def kron_all(*ops, max_dim: int = MAX_DIM):
    out = ops[0]
    for op in ops[1:]:
        out = kron(out, op, max_dim=max_dim)
    return out


def hermitian_defect(h) -> float:
    """Largest entrywise ``|H - H^dagger|``."""
    if sp.issparse(h):
        d = (h - h.conj().T).tocoo()
        return float(np.abs(d.data).max()) if d.nnz else 0.0
    h = np.asarray(h)
    return float(np.abs(h - h.conj().T).max()) if h.size else 0.0


def check_hermitian(h, atol: float = HERMITIAN_ATOL):
    """Raise ``ValidationError`` unless ``h`` is square, finite and Hermitian."""
    shape = _shape(h)
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {shape}")
    data = h.data if sp.issparse(h) else np.asarray(h)
    if not np.all(np.isfinite(data)):
        raise ValidationError("matrix has non-finite entries")
    defect = hermitian_defect(h)
    if defect > atol:
        raise ValidationError(f"matrix is not Hermitian (max |H - H^dag| = {defect:.3g})")
    return h


def trace_product(a, b) -> complex:
    """``Tr[a @ b]`` without forming the product."""
    sa, sb = _shape(a), _shape(b)
    if len(sa) != 2 or sa[0] != sa[1] or sa != sb:
        raise ValidationError(f"trace_product needs conformable square matrices, got {sa} and {sb}")
    if sp.issparse(a) or sp.issparse(b):
        a = sp.csr_matrix(a)
        return complex(a.multiply(sp.csr_matrix(b).T).sum())
    return complex(np.sum(np.asarray(a) * np.asarray(b).T))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian operator.

    ``vectors`` is a sparse matrix whose columns are the eigenvectors, in the
    same (ascending) order as ``eigenvalues``.
    """

    eigenvalues: np.ndarray
    vectors: sp.csc_matrix

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.vectors.toarray()

    def transition_frequencies(self) -> np.ndarray:
        """Matrix of ``lambda_m - lambda_n``."""
        w = self.eigenvalues
        return w[:, None] - w[None, :]

    def to_eigenbasis(self, op) -> sp.csr_matrix:
        """Matrix elements ``<m|op|n>`` as a sparse matrix."""
        v = self.vectors
        return sp.csr_matrix(v.conj().T @ sp.csr_matrix(op) @ v)


def _components(h):
    pattern = abs(sp.csr_matrix(h))
    pattern.eliminate_zeros()
    n, labels = connected_components(pattern, directed=False)
    return n, labels


def eigendecompose(h, method: str = "auto") -> SpectralDecomposition:
    """Deterministic Hermitian eigendecomposition with ascending eigenvalues.

    With ``method="auto"`` the matrix is split into independent blocks (the
    connected components of its nonzero pattern) and blocks of equal size are
    diagonalized in one batched LAPACK call.  ``method="dense"`` diagonalizes
    the whole matrix at once.  Ties keep solver order.
    """
    check_hermitian(h)
    dim = _shape(h)[0]
    if dim > MAX_DIM:
        raise CapacityError(f"dimension {dim} exceeds maximum {MAX_DIM}")
    try:
        if method == "dense":
            w, v = np.linalg.eigh(as_dense(h))
            return SpectralDecomposition(w, sp.csc_matrix(v))
        if method != "auto":
            raise ValidationError(f"unknown method {method!r}")
        return _blockwise_eigh(h, dim)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc


def _blockwise_eigh(h, dim):
    n_blocks, labels = _components(h)
    coo = sp.coo_matrix(h)
    order = np.argsort(labels, kind="stable")
    sizes = np.bincount(labels, minlength=n_blocks)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    # position of every basis state inside its own block
    local = np.empty(dim, dtype=int)
    local[order] = np.arange(dim) - np.repeat(starts, sizes)

    values = np.empty(dim)
    rows, cols, data = [], [], []
    col = 0
    for n in np.unique(sizes):
        blocks = np.flatnonzero(sizes == n)
        slot = np.full(n_blocks, -1)
        slot[blocks] = np.arange(blocks.size)
        sub = np.zeros((blocks.size, n, n), dtype=complex)
        keep = slot[labels[coo.row]] >= 0
        r, c = coo.row[keep], coo.col[keep]
        np.add.at(sub, (slot[labels[r]], local[r], local[c]), coo.data[keep])
        w, v = np.linalg.eigh(sub)
        members = order[starts[blocks][:, None] + np.arange(n)]
        span = col + np.arange(blocks.size * n).reshape(blocks.size, n)
        values[span] = w
        # v[b, i, j]: component i of eigenvector j of block b
        rows.append(np.broadcast_to(members[:, :, None], v.shape).ravel())
        cols.append(np.broadcast_to(span[:, None, :], v.shape).ravel())
        data.append(v.ravel())
        col += blocks.size * n
    perm = np.argsort(values, kind="stable")
    rank = np.empty(dim, dtype=int)
    rank[perm] = np.arange(dim)
    vecs = sp.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), rank[np.concatenate(cols)])),
        shape=(dim, dim),
    )
    return SpectralDecomposition(values[perm], vecs)
