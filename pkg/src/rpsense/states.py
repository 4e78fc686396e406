"""Initial density matrices and singlet/triplet projectors.

Per pair the initial state is ``(I_2 / 2) (x) rho_electrons``: the nucleus is
maximally mixed and the two electrons are prepared in one of the states of
:class:`InitialStateKind`.  A network starts in the tensor product of
identical pair states.
"""
from __future__ import annotations

import enum

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .linalg import check_hermitian, kron_all
from .model import PAIR_DIM, _check_capacity

_SQRT_HALF = np.sqrt(0.5)
SINGLET = np.array([0, _SQRT_HALF, -_SQRT_HALF, 0], dtype=complex)
TRIPLETS = {
    "T+": np.array([1, 0, 0, 0], dtype=complex),
    "T0": np.array([0, _SQRT_HALF, _SQRT_HALF, 0], dtype=complex),
    "T-": np.array([0, 0, 0, 1], dtype=complex),
}


class InitialStateKind(enum.Enum):
    SINGLET = "Singlet"
    CLASSICAL_MIXED = "ClassicalMixed"
    PLUS_SUPERPOSITION = "PlusSuperposition"
    CLASSICAL_GHZ = "ClassicalGHZ"
    GHZ = "GHZ"

    @classmethod
    def parse(cls, value) -> "InitialStateKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name):
                return kind
        raise ValidationError(f"unknown initial state {value!r}")


def _ket(*amps):
    return np.array(amps, dtype=complex)


def electron_density(kind: InitialStateKind) -> np.ndarray:
    """4x4 density matrix of the two electrons, basis |00>,|01>,|10>,|11>."""
    kind = InitialStateKind.parse(kind)
    if kind is InitialStateKind.SINGLET:
        return np.outer(SINGLET, SINGLET.conj())
    if kind is InitialStateKind.CLASSICAL_MIXED:
        return np.diag([0, 0.5, 0.5, 0]).astype(complex)
    if kind is InitialStateKind.PLUS_SUPERPOSITION:
        u = _ket(1, 1, 1, 1) / 2
        return np.outer(u, u.conj())
    if kind is InitialStateKind.CLASSICAL_GHZ:
        return np.diag([0.5, 0, 0, 0.5]).astype(complex)
    ghz = _ket(1, 0, 0, 1) * _SQRT_HALF
    return np.outer(ghz, ghz.conj())


def initial_density(kind, n_pairs: int) -> sp.csr_matrix:
    _check_capacity(n_pairs)
    pair = sp.csr_matrix(np.kron(np.eye(2) / 2, electron_density(kind)))
    return sp.csr_matrix(kron_all(*[pair] * n_pairs))


def check_density(rho, atol: float = 1e-12):
    """Raise ``ValidationError`` unless ``rho`` is a valid density matrix."""
    check_hermitian(rho, atol)
    tr = complex(rho.diagonal().sum())
    if abs(tr - 1) > atol:
        raise ValidationError(f"density matrix trace is {tr}, expected 1")
    dense = rho.toarray() if sp.issparse(rho) else np.asarray(rho)
    lo = np.linalg.eigvalsh(dense).min()
    if lo < -1e-10:
        raise ValidationError(f"density matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
    return rho


def _local_projector(vec, pair, n_pairs):
    if not 0 <= pair < n_pairs:
        raise ValidationError(f"pair {pair} out of range for {n_pairs} pairs")
    _check_capacity(n_pairs)
    local = sp.csr_matrix(np.kron(np.eye(2), np.outer(vec, vec.conj())))
    eye = sp.identity(PAIR_DIM, dtype=complex, format="csr")
    return sp.csr_matrix(kron_all(*[local if p == pair else eye for p in range(n_pairs)]))


def singlet_projector(pair: int, n_pairs: int) -> sp.csr_matrix:
    """|S><S| on the electrons of ``pair``, identity on everything else."""
    return _local_projector(SINGLET, pair, n_pairs)


def triplet_projectors(pair: int, n_pairs: int) -> dict[str, sp.csr_matrix]:
    return {name: _local_projector(v, pair, n_pairs) for name, v in TRIPLETS.items()}
