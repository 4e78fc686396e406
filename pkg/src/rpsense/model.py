"""Spin Hamiltonians for single and coupled radical pairs.

Every pair contributes three spin-1/2 sites in the order (nucleus I,
electron S_A, electron S_B); pairs are concatenated so pair 0 is the most
significant factor of the tensor product.  Basis state ``|0>`` is spin up.

Single pair (energies in units of the hyperfine constant, hbar = 1)::

    H = a I.S_A + G_AB sz_A sz_B + theta (S_A^z + S_B^z)

and a network adds ``g sz_u sz_v`` for every topology edge (u, v).  The two
Ising couplings act on Pauli operators ``sz = 2 S^z``; with that scaling the
resonance ridge sits at theta = 2 G_AB and the coupled-pair yield peaks sit at
g = (theta +- (1 - Omega)) / 4.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ValidationError
from .linalg import MAX_DIM

SITES_PER_PAIR = 3
PAIR_DIM = 2**SITES_PER_PAIR

_HALF_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex) / 2,
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    "z": np.array([[1, 0], [0, -1]], dtype=complex) / 2,
}


class SpinRole(enum.Enum):
    A = "A"
    B = "B"

    @property
    def offset(self) -> int:
        return 1 if self is SpinRole.A else 2


@dataclass(frozen=True)
class PairParams:
    a: float = 1.0
    g_ab: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.a) or self.a <= 0:
            raise ValidationError(f"hyperfine strength a must be positive, got {self.a}")
        if not np.isfinite(self.g_ab):
            raise ValidationError("g_ab must be finite")


@dataclass(frozen=True)
class FieldParams:
    theta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValidationError("theta must be finite")


Edge = tuple  # (i, SpinRole, j, SpinRole)


@dataclass(frozen=True)
class NetworkTopology:
    n_pairs: int
    edges: tuple = ()

    def __post_init__(self):
        if int(self.n_pairs) != self.n_pairs or self.n_pairs < 1:
            raise ValidationError(f"n_pairs must be a positive integer, got {self.n_pairs}")
        edges = tuple(_normalize_edge(e) for e in self.edges)
        seen = set()
        for i, ri, j, rj in edges:
            if i == j:
                raise ValidationError(f"edge {(i, ri.value, j, rj.value)} couples a pair to itself")
            if not (0 <= i < self.n_pairs and 0 <= j < self.n_pairs):
                raise ValidationError(f"edge {(i, ri.value, j, rj.value)} references a missing pair")
            key = frozenset([(i, ri), (j, rj)])
            if key in seen:
                raise ValidationError(f"duplicate edge {(i, ri.value, j, rj.value)}")
            seen.add(key)
        object.__setattr__(self, "edges", edges)

    @property
    def dim(self) -> int:
        return PAIR_DIM**self.n_pairs


def _normalize_edge(e):
    i, ri, j, rj = e
    return int(i), SpinRole(getattr(ri, "value", ri)), int(j), SpinRole(getattr(rj, "value", rj))


@dataclass(frozen=True)
class ModelSpec:
    pair: PairParams = PairParams()
    field: FieldParams = FieldParams()
    g: float = 0.0
    topology: NetworkTopology = NetworkTopology(1)

    def __post_init__(self):
        if not np.isfinite(self.g):
            raise ValidationError("g must be finite")

    @property
    def theta(self) -> float:
        return self.field.theta

    def replace(self, **changes) -> "ModelSpec":
        """Copy with any of ``a``, ``g_ab``, ``theta``, ``g``, ``topology`` changed."""
        pair = dataclasses.replace(
            self.pair, **{k: changes.pop(k) for k in ("a", "g_ab") if k in changes}
        )
        field = self.field
        if "theta" in changes:
            field = FieldParams(changes.pop("theta"))
        return dataclasses.replace(self, pair=pair, field=field, **changes)


def spin_operator(site: int, axis: str, n_sites: int) -> sp.csr_matrix:
    """Spin-1/2 operator (Pauli matrix / 2) acting on one site of ``n_sites``."""
    if axis not in _HALF_PAULI:
        raise ValidationError(f"axis must be one of x, y, z; got {axis!r}")
    if not 0 <= site < n_sites:
        raise ValidationError(f"site {site} out of range for {n_sites} sites")
    if 2**n_sites > MAX_DIM:
        raise CapacityError(f"2**{n_sites} exceeds maximum dimension {MAX_DIM}")
    left = sp.identity(2**site, dtype=complex, format="csr")
    right = sp.identity(2 ** (n_sites - site - 1), dtype=complex, format="csr")
    return sp.kron(sp.kron(left, _HALF_PAULI[axis]), right, format="csr")


def _check_capacity(n_pairs):
    if PAIR_DIM**n_pairs > MAX_DIM:
        raise CapacityError(
            f"{n_pairs} pairs need dimension {PAIR_DIM**n_pairs} > maximum {MAX_DIM}"
        )


@lru_cache(maxsize=32)
def hamiltonian_terms(topology: NetworkTopology):
    """Parameter-free pieces of the network Hamiltonian.

    Returns ``(hyperfine, intra, zeeman, coupling)`` such that
    ``H = a*hyperfine + g_ab*intra + theta*zeeman + g*coupling``.
    """
    n = topology.n_pairs
    _check_capacity(n)
    n_sites = SITES_PER_PAIR * n
    sz = lambda s: spin_operator(s, "z", n_sites)  # noqa: E731
    dim = 2**n_sites
    hyperfine = sp.csr_matrix((dim, dim), dtype=complex)
    intra = sp.csr_matrix((dim, dim), dtype=complex)
    zeeman = sp.csr_matrix((dim, dim), dtype=complex)
    for p in range(n):
        nuc, ea, eb = (SITES_PER_PAIR * p + k for k in range(3))
        for ax in "xyz":
            hyperfine = hyperfine + spin_operator(nuc, ax, n_sites) @ spin_operator(ea, ax, n_sites)
        intra = intra + 4 * sz(ea) @ sz(eb)
        zeeman = zeeman + sz(ea) + sz(eb)
    coupling = sp.csr_matrix((dim, dim), dtype=complex)
    for i, ri, j, rj in topology.edges:
        coupling = coupling + 4 * sz(SITES_PER_PAIR * i + ri.offset) @ sz(SITES_PER_PAIR * j + rj.offset)
    terms = tuple(sp.csr_matrix(t) for t in (hyperfine, intra, zeeman, coupling))
    for t in terms:
        t.eliminate_zeros()
    return terms


def build_network_hamiltonian(m: ModelSpec) -> sp.csr_matrix:
    hf, intra, zeeman, coupling = hamiltonian_terms(m.topology)
    h = m.pair.a * hf
    if m.pair.g_ab:
        h = h + m.pair.g_ab * intra
    if m.field.theta:
        h = h + m.field.theta * zeeman
    if m.g and m.topology.edges:
        h = h + m.g * coupling
    return sp.csr_matrix(h)


def build_pair_hamiltonian(p: PairParams, f: FieldParams) -> sp.csr_matrix:
    """8x8 Hamiltonian of one isolated pair."""
    return build_network_hamiltonian(ModelSpec(pair=p, field=f))


_TWO_PAIR = {
    "two_pair_G1": (SpinRole.A, SpinRole.A),
    "two_pair_G2": (SpinRole.B, SpinRole.A),
    "two_pair_G4": (SpinRole.B, SpinRole.B),
}


def preset_topology(kind: str, n: int | None = None) -> NetworkTopology:
    """Named coupling layouts.

    ``single`` is one isolated pair; the ``two_pair_*`` presets are the G1, G2
    and G4 configurations (G3 is the mirror image of G2); ``chain_G2`` and
    ``chain_G4`` take the chain length ``n``; ``star_G4`` is a hub with three
    leaves.
    """
    if kind == "single":
        return NetworkTopology(1)
    if kind in _TWO_PAIR:
        ri, rj = _TWO_PAIR[kind]
        return NetworkTopology(2, ((0, ri, 1, rj),))
    if kind in ("chain_G2", "chain_G4"):
        if n is None or n < 2:
            raise ValidationError(f"{kind} needs a chain length n >= 2, got {n}")
        ri = SpinRole.B
        rj = SpinRole.A if kind == "chain_G2" else SpinRole.B
        return NetworkTopology(n, tuple((i, ri, i + 1, rj) for i in range(n - 1)))
    if kind == "star_G4":
        if n not in (None, 4):
            raise ValidationError("star_G4 is fixed at one hub and three leaves")
        return NetworkTopology(4, tuple((0, SpinRole.B, k, SpinRole.B) for k in (1, 2, 3)))
    raise ValidationError(f"unknown topology preset {kind!r}")


def parse_topology(text: str) -> NetworkTopology:
    """Parse ``"two_pair_G4"`` or ``"chain_G2:3"`` style preset names."""
    name, _, size = text.partition(":")
    return preset_topology(name, int(size) if size else None)


def to_physical_millitesla(theta: float, a_mT: float) -> float:
    """Convert a field in units of the hyperfine constant to millitesla."""
    if not a_mT > 0:
        raise ValidationError(f"a_mT must be positive, got {a_mT}")
    return theta * a_mT
