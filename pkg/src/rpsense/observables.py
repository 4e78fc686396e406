"""Singlet yields, response curves and patterns, sensitivity, closed forms.

The lifetime-integrated singlet yield of the observed pair is evaluated in
the eigenbasis of H::

    Phi_S = sum_mn Re[P_mn rho_nm] f(w_mn),   f(w) = k^2 / (k^2 + w^2)

with ``rho`` the initial density matrix (nuclei already averaged) and ``P``
the local singlet projector.  ``total_yield_timedomain_oracle`` computes the
same quantity by integrating the von Neumann equation in time and is kept
deliberately independent of the spectral route.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NoCrossingError, NumericalError, ValidationError
from .linalg import SpectralDecomposition, as_dense, eigendecompose
from .model import ModelSpec, build_network_hamiltonian
from .states import InitialStateKind, initial_density, singlet_projector

DEFAULT_K = 0.1
YIELD_TOL = 1e-9
INSENSITIVE_THRESHOLD = 1e-12
# below this dimension dense matmuls beat scipy.sparse overhead
DENSE_LIMIT = 128


@dataclass(frozen=True)
class YieldParams:
    k: float = DEFAULT_K

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k > 0):
            raise ValidationError(f"recombination rate k must be positive and finite, got {self.k}")


def lorentzian(omega, k):
    return k * k / (k * k + np.square(omega))


def _check_yield(value):
    if not -YIELD_TOL <= value <= 1 + YIELD_TOL:
        raise NumericalError(f"singlet yield {value!r} outside [0, 1]")
    return value


def _weighted_gaps(decomp: SpectralDecomposition, rho0, proj):
    """Nonzero terms ``Re[P_mn rho_nm]`` and their gaps ``w_m - w_n``."""
    dim = decomp.dim
    for name, m in (("rho0", rho0), ("proj", proj)):
        if np.shape(m) != (dim, dim):
            raise ValidationError(f"{name} has shape {np.shape(m)}, expected {(dim, dim)}")
    w = decomp.eigenvalues
    if dim <= DENSE_LIMIT:
        v = decomp.eigenvectors
        vh = v.conj().T
        p = vh @ as_dense(proj) @ v
        r = vh @ as_dense(rho0) @ v
        return (p * r.T).real.ravel(), (w[:, None] - w[None, :]).ravel()
    p = decomp.to_eigenbasis(proj)
    r = decomp.to_eigenbasis(rho0)
    prod = p.multiply(r.T).tocoo()
    return prod.data.real, w[prod.row] - w[prod.col]


def yield_instant(decomp: SpectralDecomposition, rho0, proj, t: float) -> float:
    """Singlet probability ``Tr[P rho(t)]`` at time ``t``."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    weights, omega = _weighted_gaps(decomp, rho0, proj)
    return _check_yield(float(np.sum(weights * np.cos(omega * t))))


def total_singlet_yield(decomp: SpectralDecomposition, rho0, proj, yp: YieldParams) -> float:
    weights, omega = _weighted_gaps(decomp, rho0, proj)
    return _check_yield(float(np.sum(weights * lorentzian(omega, yp.k))))


@dataclass
class OracleResult:
    value: float
    t_max: float
    dt: float
    steps: int
    warnings: list = field(default_factory=list)


def total_yield_timedomain_oracle(h, rho0, proj, yp: YieldParams, t_max=None, dt=None) -> OracleResult:
    """``k * int_0^t_max Tr[P rho(t)] exp(-k t) dt`` by RK4 + trapezoid.

    rho(t) follows ``d rho/dt = i[H, rho]``, stepped with classical RK4.  The
    Laplace integral uses the trapezoidal rule plus the first Euler-Maclaurin
    endpoint correction; the integrand derivative comes from the same ODE.
    Defaults: ``t_max = 21/k`` (tail below 1e-9) and ``dt = 0.05/||H||``.
    """
    h = as_dense(h)
    rho = as_dense(rho0)
    p = as_dense(proj)
    k = yp.k
    norm = float(np.linalg.norm(h, 2)) or 1.0
    if t_max is None:
        t_max = 21.0 / k
    if dt is None:
        dt = 0.05 / norm
    steps = int(math.ceil(t_max / dt))
    dt = t_max / steps
    notes = []
    if dt > 0.05 / norm:
        notes.append(f"dt={dt:.3g} exceeds 0.05/||H||={0.05 / norm:.3g}")
    if k * t_max < 10:
        notes.append(f"t_max={t_max:.3g} is shorter than 10/k")

    def deriv(r):
        hr = h @ r
        return 1j * (hr - hr.conj().T)

    pt = p.T
    def integrand(r, drdt, t):
        decay = k * math.exp(-k * t)
        y = np.sum(pt * r).real
        dy = np.sum(pt * drdt).real
        return decay * y, decay * (dy - k * y)

    d0 = deriv(rho)
    f0, df0 = integrand(rho, d0, 0.0)
    total = 0.5 * f0
    for n in range(1, steps + 1):
        k1 = d0
        k2 = deriv(rho + 0.5 * dt * k1)
        k3 = deriv(rho + 0.5 * dt * k2)
        k4 = deriv(rho + dt * k3)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        d0 = deriv(rho)
        fn, dfn = integrand(rho, d0, n * dt)
        total += fn
    total -= 0.5 * fn
    value = dt * total - dt * dt / 12 * (dfn - df0)
    return OracleResult(float(value), t_max, dt, steps, notes)


class YieldEvaluator:
    """Phi_S of one observed pair for a family of models sharing a topology."""

    def __init__(self, kind, n_pairs: int, observed_pair: int, yp: YieldParams):
        self.kind = InitialStateKind.parse(kind)
        self.observed_pair = observed_pair
        self.yp = yp
        self.rho0 = initial_density(self.kind, n_pairs)
        self.proj = singlet_projector(observed_pair, n_pairs)

    def __call__(self, m: ModelSpec) -> float:
        decomp = eigendecompose(build_network_hamiltonian(m))
        return total_singlet_yield(decomp, self.rho0, self.proj, self.yp)


def singlet_yield(m: ModelSpec, kind, observed_pair: int = 0, yp: YieldParams = YieldParams()) -> float:
    return YieldEvaluator(kind, m.topology.n_pairs, observed_pair, yp)(m)


def _row(job):
    evaluator, models = job
    return [evaluator(m) for m in models]


def _evaluate_rows(evaluator, rows, workers):
    """Evaluate a list of model rows, preserving order."""
    if workers is None or workers <= 1 or len(rows) <= 1:
        return [_row((evaluator, r)) for r in rows]
    with ProcessPoolExecutor(max_workers=min(workers, len(rows))) as pool:
        return list(pool.map(_row, [(evaluator, r) for r in rows]))


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


def _grid(values, name):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValidationError(f"{name} grid is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} grid has non-finite values")
    if np.any(np.diff(arr) <= 0):
        raise ValidationError(f"{name} grid must be strictly ascending")
    return arr


_AXES = ("theta", "g", "g_ab")


@dataclass
class ResponseCurve:
    sweep_values: np.ndarray
    yields: np.ndarray
    axis: str
    fixed_params: dict
    observed_pair: int


@dataclass
class ResponsePattern:
    axis1: np.ndarray
    axis2: np.ndarray
    yield_grid: np.ndarray  # indexed [axis2][axis1]
    axis1_name: str
    axis2_name: str
    fixed_params: dict
    observed_pair: int

    def row(self, i: int) -> ResponseCurve:
        fixed = dict(self.fixed_params, **{self.axis2_name: float(self.axis2[i])})
        return ResponseCurve(self.axis1, self.yield_grid[i], self.axis1_name, fixed, self.observed_pair)

    def column(self, j: int) -> ResponseCurve:
        fixed = dict(self.fixed_params, **{self.axis1_name: float(self.axis1[j])})
        return ResponseCurve(self.axis2, self.yield_grid[:, j], self.axis2_name, fixed, self.observed_pair)


def _fixed(m: ModelSpec, yp, kind, exclude):
    params = {
        "a": m.pair.a, "g_ab": m.pair.g_ab, "theta": m.theta, "g": m.g, "k": yp.k,
        "initial_state": InitialStateKind.parse(kind).value, "n_pairs": m.topology.n_pairs,
    }
    for name in exclude:
        params.pop(name)
    return params


def response_curve(m: ModelSpec, kind, observed_pair: int, sweep, yp: YieldParams = YieldParams(),
                   axis: str = "theta", workers: int | None = None) -> ResponseCurve:
    """Phi_S of ``observed_pair`` as one parameter (``theta`` by default) is swept."""
    if axis not in _AXES:
        raise ValidationError(f"axis must be one of {_AXES}, got {axis!r}")
    values = _grid(sweep, axis)
    ev = YieldEvaluator(kind, m.topology.n_pairs, observed_pair, yp)
    models = [m.replace(**{axis: float(v)}) for v in values]
    chunks = np.array_split(np.arange(values.size), max(1, min(values.size, 4 * (workers or 1))))
    rows = _evaluate_rows(ev, [[models[i] for i in c] for c in chunks if c.size], workers)
    yields = np.array([y for r in rows for y in r])
    return ResponseCurve(values, yields, axis, _fixed(m, yp, kind, [axis]), observed_pair)


def response_pattern(m: ModelSpec, kind, observed_pair: int, axis1, axis2, yp: YieldParams = YieldParams(),
                     axis2_name: str = "g", axis1_name: str = "theta",
                     workers: int | None = None) -> ResponsePattern:
    """2-D grid of Phi_S; rows follow ``axis2`` (g or g_ab), columns ``axis1`` (theta)."""
    for name in (axis1_name, axis2_name):
        if name not in _AXES:
            raise ValidationError(f"axis must be one of {_AXES}, got {name!r}")
    if axis1_name == axis2_name:
        raise ValidationError("pattern axes must differ")
    a1 = _grid(axis1, axis1_name)
    a2 = _grid(axis2, axis2_name)
    ev = YieldEvaluator(kind, m.topology.n_pairs, observed_pair, yp)
    rows = [[m.replace(**{axis2_name: float(v2), axis1_name: float(v1)}) for v1 in a1] for v2 in a2]
    grid = np.array(_evaluate_rows(ev, rows, workers))
    return ResponsePattern(a1, a2, grid, axis1_name, axis2_name,
                           _fixed(m, yp, kind, [axis1_name, axis2_name]), observed_pair)


@dataclass(frozen=True)
class Sensitivity:
    value: float          # sqrt(Phi) / dPhi/dtheta, inf when insensitive
    derivative: float
    yield_value: float
    insensitive: bool

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def sensitivity(m: ModelSpec, kind, observed_pair: int = 0, theta: float | None = None,
                yp: YieldParams = YieldParams(), h: float | None = None) -> Sensitivity:
    """Field sensitivity ``sqrt(Phi_S) / (dPhi_S/dtheta)`` by central difference."""
    theta = m.theta if theta is None else float(theta)
    if h is None:
        h = 1e-4 * max(1.0, abs(theta))
    if not h > 0:
        raise ValidationError("finite-difference step h must be positive")
    ev = YieldEvaluator(kind, m.topology.n_pairs, observed_pair, yp)
    phi = ev(m.replace(theta=theta))
    if phi <= 0:
        raise ValidationError(f"sensitivity undefined for zero yield (Phi={phi:.3g})")
    deriv = (ev(m.replace(theta=theta + h)) - ev(m.replace(theta=theta - h))) / (2 * h)
    if abs(deriv) < INSENSITIVE_THRESHOLD:
        return Sensitivity(math.inf, deriv, phi, True)
    return Sensitivity(math.sqrt(max(phi, 0.0)) / deriv, deriv, phi, False)


# closed forms for a single pair ------------------------------------------------

@dataclass(frozen=True)
class ClosedFormTerms:
    Omega: float
    o: float
    p: float
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float


def closed_form_terms(a: float, theta: float, g_ab: float = 0.0) -> ClosedFormTerms:
    """Auxiliary quantities of the closed-form yields; ``Omega = sqrt(a^2 + theta^2)``."""
    om = math.hypot(a, theta)
    o = math.hypot(a, theta + 2 * g_ab)
    p = math.hypot(a, theta - 2 * g_ab)
    return ClosedFormTerms(
        Omega=om, o=o, p=p,
        gamma1=2 * g_ab + p - theta,
        gamma2=2 * g_ab - p - theta,
        gamma3=2 * g_ab + o + theta,
        gamma4=2 * g_ab - o + theta,
        theta1=om,
        theta2=a / 2 + theta / 2 + om / 2,
        theta3=a / 2 - theta / 2 - om / 2,
        theta4=a / 2 + theta / 2 - om / 2,
        theta5=a / 2 - theta / 2 + om / 2,
    )


EQ5_VARIANTS = ("corrected", "printed", "numerator_swap")


def closed_form_phi_gab(a: float, theta: float, g_ab: float, yp: YieldParams = YieldParams(),
                        variant: str = "corrected") -> float:
    """Singlet-born yield of an isolated pair with intra-pair coupling ``g_ab``.

    ``variant`` selects how the two gamma_3/gamma_4 transition weights are
    written: ``corrected`` uses ``gamma_i^2 / (4 (a^2 + gamma_i^2))`` (exact),
    ``printed`` the squared denominators with a repeated gamma_3 numerator, and
    ``numerator_swap`` squared denominators with a gamma_4 numerator.  Only the
    first reproduces the spectral yield; the others are kept for comparison.
    """
    if variant not in EQ5_VARIANTS:
        raise ValidationError(f"variant must be one of {EQ5_VARIANTS}")
    if not a > 0:
        raise ValidationError("a must be positive")
    t = closed_form_terms(a, theta, g_ab)
    f = lambda x: lorentzian(x, yp.k)  # noqa: E731
    a2 = a * a
    g1, g2, g3, g4 = (t.gamma1**2, t.gamma2**2, t.gamma3**2, t.gamma4**2)
    val = 0.25 + (a2 * a2 / (a2 + g1) ** 2 + a2 * a2 / (a2 + g2) ** 2
                  + g3 * g3 / (a2 + g3) ** 2 + g4 * g4 / (a2 + g4) ** 2) / 8
    val += a2 / (4 * (a2 + g2)) * f(a / 2 - t.gamma2 / 2)
    val += a2 / (4 * (a2 + g1)) * f(a / 2 - t.gamma1 / 2)
    if variant == "corrected":
        w3, w4 = g3 / (4 * (a2 + g3)), g4 / (4 * (a2 + g4))
    elif variant == "printed":
        w3, w4 = g3 / (4 * (a2 + g3) ** 2), g3 / (4 * (a2 + g4) ** 2)
    else:
        w3, w4 = g3 / (4 * (a2 + g3) ** 2), g4 / (4 * (a2 + g4) ** 2)
    val += w3 * f(a / 2 - t.gamma4 / 2) + w4 * f(a / 2 - t.gamma3 / 2)
    val += a2 * a2 / (4 * (a2 + g2) * (a2 + g1)) * f(t.p)
    val += g3 * g4 / (4 * (a2 + g3) * (a2 + g4)) * f(t.o)
    return float(val)


EQ7_VARIANTS = ("corrected", "printed")


def closed_form_phi_init(kind, theta: float, yp: YieldParams = YieldParams(), a: float = 1.0,
                         variant: str = "corrected") -> float:
    """Yield of an isolated pair (G_AB = 0) for three initial electron states.

    The transition weights of the theta_2..theta_5 lines are
    ``(1 -+ theta/Omega)``; ``variant="printed"`` uses ``(1 -+ theta^2/Omega^2)``
    instead, which is exact only at theta = 0 and for the classical state.
    """
    kind = InitialStateKind.parse(kind)
    if variant not in EQ7_VARIANTS:
        raise ValidationError(f"variant must be one of {EQ7_VARIANTS}")
    if not a > 0:
        raise ValidationError("a must be positive")
    t = closed_form_terms(a, theta)
    f = lambda x: lorentzian(x, yp.k)  # noqa: E731
    ratio = theta / t.Omega
    c = ratio if variant == "corrected" else ratio * ratio
    low = f(t.theta2) + f(t.theta3)
    high = f(t.theta4) + f(t.theta5)
    classical = 3 / 8 + ratio * ratio / 8 + a * a / t.Omega**2 / 8 * f(t.theta1)
    if kind is InitialStateKind.CLASSICAL_MIXED:
        return float(classical)
    if kind is InitialStateKind.SINGLET:
        return float(classical + (1 - c) / 8 * low + (1 + c) / 8 * high)
    if kind is InitialStateKind.PLUS_SUPERPOSITION:
        return float(0.25 - (1 - c) / 16 * low - (1 + c) / 16 * high)
    raise ValidationError(f"no closed form for initial state {kind.value}")


def sensitivity_ratio_R(k: float, a: float, theta: float) -> float:
    """Weak-field ratio of singlet-born to plus-state inverse sensitivities."""
    if not k > 0:
        raise ValidationError("k must be positive")
    k2, a2, t2 = k * k, a * a, theta * theta
    num = 2 * k2 * a2 + 0.5 * k2 * t2 + a2 * t2
    den = 4 * k2 + 2.5 * k2 * a2 + 0.75 * k2 * t2 + 0.375 * a2 * t2
    return num / den


def find_kstar(a: float, theta: float, k_max: float | None = None, tol: float = 1e-10) -> float:
    """Recombination rate where ``sensitivity_ratio_R`` crosses 1 (bisection on (0, 10a])."""
    if not a > 0:
        raise ValidationError("a must be positive")
    lo, hi = 1e-12 * a, 10 * a if k_max is None else k_max
    g = lambda k: sensitivity_ratio_R(k, a, theta) - 1  # noqa: E731
    glo, ghi = g(lo), g(hi)
    if theta == 0 or glo * ghi > 0:
        raise NoCrossingError(f"R(k) - 1 has no sign change on ({lo:g}, {hi:g}] for a={a}, theta={theta}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def printed_kstar(a: float, theta: float) -> tuple[complex, complex]:
    """Both branches of the closed-form crossing as printed (may be complex).

    Reported as a diagnostic next to :func:`find_kstar`; for real inputs the
    inner radicand is negative whenever the discriminant is real.
    """
    b = a * a / 2 + theta * theta / 4
    disc = np.sqrt(complex(b * b - 10 * a * a * theta * theta))
    return tuple(complex(np.sqrt((-b + s * disc) / 8)) for s in (1, -1))
