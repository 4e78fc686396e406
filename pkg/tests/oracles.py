"""Brute-force reference implementations used only by the tests.

Everything here is dense numpy built from explicit Pauli matrices, with no
imports from rpsense, so it checks the package rather than echoing it.
"""
import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
ELECTRON_STATES = {
    "Singlet": np.outer(SINGLET, SINGLET),
    "ClassicalMixed": np.diag([0, 0.5, 0.5, 0]).astype(complex),
    "PlusSuperposition": np.full((4, 4), 0.25, dtype=complex),
    "ClassicalGHZ": np.diag([0.5, 0, 0, 0.5]).astype(complex),
    "GHZ": np.outer([1, 0, 0, 1], [1, 0, 0, 1]).astype(complex) / 2,
}


def site_op(op, site, n_sites):
    mats = [op if s == site else I2 for s in range(n_sites)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def hamiltonian(n_pairs=1, a=1.0, g_ab=0.0, theta=0.0, g=0.0, edges=()):
    """Spin ops are Pauli/2; the Ising couplings multiply Pauli z products."""
    n = 3 * n_pairs
    h = np.zeros((2**n, 2**n), dtype=complex)
    for p in range(n_pairs):
        nuc, ea, eb = 3 * p, 3 * p + 1, 3 * p + 2
        for op in (X, Y, Z):
            h += a * site_op(op / 2, nuc, n) @ site_op(op / 2, ea, n)
        h += g_ab * site_op(Z, ea, n) @ site_op(Z, eb, n)
        h += theta * (site_op(Z / 2, ea, n) + site_op(Z / 2, eb, n))
    for i, ri, j, rj in edges:
        si = 3 * i + (1 if ri == "A" else 2)
        sj = 3 * j + (1 if rj == "A" else 2)
        h += g * site_op(Z, si, n) @ site_op(Z, sj, n)
    return h


def density(kind, n_pairs=1):
    pair = np.kron(I2 / 2, ELECTRON_STATES[kind])
    out = pair
    for _ in range(n_pairs - 1):
        out = np.kron(out, pair)
    return out


def projector(pair, n_pairs=1):
    out = np.ones((1, 1), dtype=complex)
    for p in range(n_pairs):
        local = np.kron(I2, np.outer(SINGLET, SINGLET)) if p == pair else np.eye(8)
        out = np.kron(out, local)
    return out


def spectral_yield(h, rho, proj, k):
    w, v = np.linalg.eigh(h)
    p = v.conj().T @ proj @ v
    r = v.conj().T @ rho @ v
    om = w[:, None] - w[None, :]
    return float(np.sum((p * r.T).real * k**2 / (k**2 + om**2)))


def expm_yield(h, rho, proj, k, t_max=None):
    """k * int Tr[P e^{iHt} rho e^{-iHt}] e^{-kt} dt with adaptive quadrature."""
    t_max = 40.0 / k if t_max is None else t_max

    def y(t):
        u = expm(1j * h * t)
        return np.trace(proj @ u @ rho @ u.conj().T).real * k * np.exp(-k * t)

    val, _ = quad(y, 0, t_max, limit=2000, epsabs=1e-12, epsrel=1e-12)
    return val
