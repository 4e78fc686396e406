import numpy as np
import pytest
import scipy.sparse as sp

from rpsense.errors import CapacityError, ValidationError
from rpsense.linalg import eigendecompose, hermitian_defect
from rpsense.model import (
    FieldParams, ModelSpec, NetworkTopology, PairParams, SpinRole, build_network_hamiltonian,
    build_pair_hamiltonian, parse_topology, preset_topology, spin_operator, to_physical_millitesla,
)

import oracles

A, B = SpinRole.A, SpinRole.B


def dense(m):
    return m.toarray()


def test_spin_operator_single_site():
    np.testing.assert_array_equal(dense(spin_operator(0, "z", 1)), np.diag([0.5, -0.5]))


@pytest.mark.parametrize("site", [0, 1, 2])
def test_spin_commutator(site):
    sx, sy, sz = (dense(spin_operator(site, ax, 3)) for ax in "xyz")
    np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-15)


def test_spin_operator_embedding():
    expected = np.kron(np.kron(np.eye(2), np.diag([0.5, -0.5])), np.eye(2))
    np.testing.assert_array_equal(dense(spin_operator(1, "z", 3)), expected)
    np.testing.assert_array_equal(np.diag(expected)[:4], [0.5, 0.5, -0.5, -0.5])
    with pytest.raises(ValidationError):
        spin_operator(3, "z", 3)


def test_pair_hamiltonian_matches_bruteforce():
    h = build_pair_hamiltonian(PairParams(0.8, 0.3), FieldParams(0.6))
    np.testing.assert_allclose(dense(h), oracles.hamiltonian(1, a=0.8, g_ab=0.3, theta=0.6), atol=1e-15)


def test_pair_hamiltonian_zero_field_spectrum():
    w = eigendecompose(build_pair_hamiltonian(PairParams(), FieldParams())).eigenvalues
    np.testing.assert_allclose(w, [-0.75] * 2 + [0.25] * 6, atol=1e-14)


def test_pair_hamiltonian_traceless_hermitian():
    h = build_pair_hamiltonian(PairParams(1.0, 0.3), FieldParams(0.0))
    assert h.shape == (8, 8)
    assert hermitian_defect(h) <= 1e-12
    assert abs(h.diagonal().sum()) <= 1e-10


def test_pair_hamiltonian_contains_omega_gap():
    theta = 0.5
    w = eigendecompose(build_pair_hamiltonian(PairParams(), FieldParams(theta))).eigenvalues
    gaps = np.abs(w[:, None] - w[None, :])
    omega = np.sqrt(1 + theta**2)
    assert np.min(np.abs(gaps - omega)) <= 1e-12
    # the four theta2..theta5 lines
    for gap in (0.5 + theta / 2 + omega / 2, 0.5 - theta / 2 - omega / 2,
                0.5 + theta / 2 - omega / 2, 0.5 - theta / 2 + omega / 2):
        assert np.min(np.abs(gaps - abs(gap))) <= 1e-12


@pytest.mark.parametrize("kind,edges", [
    ("two_pair_G1", [(0, "A", 1, "A")]),
    ("two_pair_G2", [(0, "B", 1, "A")]),
    ("two_pair_G4", [(0, "B", 1, "B")]),
    ("chain_G2:3", [(0, "B", 1, "A"), (1, "B", 2, "A")]),
])
def test_network_matches_bruteforce(kind, edges):
    topo = parse_topology(kind)
    m = ModelSpec(PairParams(1.0, -0.1), FieldParams(0.9), 0.35, topo)
    ref = oracles.hamiltonian(topo.n_pairs, 1.0, -0.1, 0.9, 0.35, edges)
    np.testing.assert_allclose(dense(build_network_hamiltonian(m)), ref, atol=1e-14)


def test_network_invariants():
    m = ModelSpec(PairParams(1.0, 0.2), FieldParams(1.3), 0.4, preset_topology("chain_G2", 3))
    h = build_network_hamiltonian(m)
    assert h.shape == (512, 512)
    assert hermitian_defect(h) <= 1e-12
    assert abs(h.diagonal().sum()) <= 1e-10


def test_uncoupled_network_is_tensor_sum():
    p, f = PairParams(1.0, 0.15), FieldParams(0.7)
    single = eigendecompose(build_pair_hamiltonian(p, f)).eigenvalues
    m = ModelSpec(p, f, 0.0, preset_topology("two_pair_G4"))
    pair_sums = np.sort((single[:, None] + single[None, :]).ravel())
    np.testing.assert_allclose(eigendecompose(build_network_hamiltonian(m)).eigenvalues, pair_sums, atol=1e-9)
    h1 = build_pair_hamiltonian(p, f)
    eye = sp.identity(8)
    np.testing.assert_allclose(dense(build_network_hamiltonian(m)),
                               dense(sp.kron(h1, eye) + sp.kron(eye, h1)), atol=1e-14)


def _first_order_levels(theta, g, edges):
    """Degenerate first-order perturbation theory from the isolated pairs."""
    h0 = oracles.hamiltonian(2, theta=theta)
    coupling = oracles.hamiltonian(2, theta=0.0, g=1.0, edges=edges) - oracles.hamiltonian(2)
    w, v = np.linalg.eigh(h0)
    levels = []
    i = 0
    while i < w.size:
        j = i
        while j < w.size and abs(w[j] - w[i]) < 1e-9:
            j += 1
        sub = v[:, i:j].conj().T @ coupling @ v[:, i:j]
        levels.extend(w[i] + g * np.linalg.eigvalsh(sub))
        i = j
    return np.sort(levels)


@pytest.mark.parametrize("edges", [[(0, "B", 1, "B")], [(0, "A", 1, "A")]])
def test_weak_coupling_first_order(edges):
    g = 0.01
    topo = NetworkTopology(2, tuple(edges))
    exact = eigendecompose(build_network_hamiltonian(ModelSpec(field=FieldParams(1.0), g=g, topology=topo)))
    err = np.abs(exact.eigenvalues - _first_order_levels(1.0, g, edges)).max()
    assert err <= 1e-3


def test_g4_coupling_commutes_so_first_order_is_exact():
    g = 0.2
    exact = eigendecompose(build_network_hamiltonian(
        ModelSpec(field=FieldParams(1.0), g=g, topology=preset_topology("two_pair_G4")))).eigenvalues
    np.testing.assert_allclose(exact, _first_order_levels(1.0, g, [(0, "B", 1, "B")]), atol=1e-12)


def test_field_reversal_spectrum():
    for theta in (0.3, 1.7):
        plus = eigendecompose(build_pair_hamiltonian(PairParams(), FieldParams(theta))).eigenvalues
        minus = eigendecompose(build_pair_hamiltonian(PairParams(), FieldParams(-theta))).eigenvalues
        np.testing.assert_allclose(plus, minus, atol=1e-10)


@pytest.mark.parametrize("kind", ["two_pair_G1", "two_pair_G4"])
def test_pair_swap_symmetry(kind):
    m = ModelSpec(PairParams(1.0, 0.1), FieldParams(0.8), 0.3, preset_topology(kind))
    h = dense(build_network_hamiltonian(m))
    swap = np.zeros((64, 64))
    for i in range(8):
        for j in range(8):
            swap[j * 8 + i, i * 8 + j] = 1
    np.testing.assert_allclose(swap @ h @ swap.T, h, atol=1e-14)


def test_presets():
    assert preset_topology("two_pair_G4").edges == ((0, B, 1, B),)
    assert preset_topology("two_pair_G2").edges == ((0, B, 1, A),)
    assert preset_topology("two_pair_G1").edges == ((0, A, 1, A),)
    assert preset_topology("chain_G2", 3).edges == ((0, B, 1, A), (1, B, 2, A))
    assert preset_topology("chain_G4", 4).edges == ((0, B, 1, B), (1, B, 2, B), (2, B, 3, B))
    assert preset_topology("star_G4").edges == ((0, B, 1, B), (0, B, 2, B), (0, B, 3, B))
    with pytest.raises(ValidationError):
        preset_topology("two_pair_G3")
    with pytest.raises(ValidationError):
        preset_topology("chain_G2", 1)


def test_topology_validation():
    with pytest.raises(ValidationError):
        NetworkTopology(2, ((0, "B", 0, "A"),))
    with pytest.raises(ValidationError):
        NetworkTopology(2, ((0, "B", 2, "A"),))
    with pytest.raises(ValidationError):
        NetworkTopology(2, ((0, "B", 1, "A"), (1, "A", 0, "B")))


def test_capacity_guard():
    with pytest.raises(CapacityError):
        build_network_hamiltonian(ModelSpec(topology=preset_topology("chain_G4", 6)))


def test_params_validation():
    with pytest.raises(ValidationError):
        PairParams(a=0.0)
    with pytest.raises(ValidationError):
        FieldParams(float("nan"))


def test_millitesla_conversion():
    assert to_physical_millitesla(1.0, 0.01) == pytest.approx(0.01)
    assert to_physical_millitesla(0.0, 3.0) == 0.0
    assert to_physical_millitesla(2.5, 0.2) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        to_physical_millitesla(1.0, 0.0)
