"""Yield-peak detection and magnetic-field inversion from coupling sweeps.

Under S_B-S_B (G4) coupling the two-pair yield, swept in g at fixed field,
peaks where first-order level crossings occur.  The two perturbative peaks
satisfy ``g1 + g2 = theta / 2``, so ``theta = 2 (g1 + g2)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import InsufficientPeaksError, ValidationError
from .observables import ResponseCurve

DEFAULT_MIN_PROMINENCE = 1e-4


@dataclass(frozen=True)
class Peak:
    location: float
    height: float
    prominence: float


@dataclass(frozen=True)
class FieldEstimate:
    theta_hat: float
    g1: float
    g2: float


@dataclass(frozen=True)
class PerturbativePrediction:
    g_values: tuple
    trust_flags: tuple   # "perturbative" or "strong_coupling", per value

    @property
    def perturbative(self) -> tuple:
        return tuple(g for g, f in zip(self.g_values, self.trust_flags) if f == "perturbative")


def _refine(x, y, i):
    """Vertex of the parabola through samples i-1, i, i+1."""
    x0, x1, x2 = x[i - 1 : i + 2]
    y0, y1, y2 = y[i - 1 : i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0:
        return x1, y1
    xv = -b / (2 * a)
    if not x0 <= xv <= x2:
        return x1, y1
    c = y1 - a * x1 * x1 - b * x1
    return xv, a * xv * xv + b * xv + c


def detect_peaks(curve: ResponseCurve, min_prominence: float = DEFAULT_MIN_PROMINENCE) -> list[Peak]:
    """Interior maxima with prominence above ``min_prominence``, sorted by location."""
    if min_prominence < 0:
        raise ValidationError("min_prominence must be non-negative")
    x = np.asarray(curve.sweep_values, dtype=float)
    y = np.asarray(curve.yields, dtype=float)
    if x.size == 0:
        raise ValidationError("curve is empty")
    if x.size < 3:
        return []
    idx, props = find_peaks(y, prominence=min_prominence)
    peaks = []
    for i, prom in zip(idx, props["prominences"]):
        if prom <= min_prominence:
            continue
        loc, height = _refine(x, y, i)
        peaks.append(Peak(float(loc), float(height), float(prom)))
    return sorted(peaks, key=lambda p: p.location)


def predict_peaks_g4(theta: float) -> PerturbativePrediction:
    """Coupling strengths where first-order degeneracies put G4 yield peaks.

    ``(theta -+ (Omega - 1)) / 4`` are the perturbative pair; the two
    ``((1 + Omega) -+ theta) / 4`` lines lie at strong coupling and are flagged.
    """
    if not theta > 0:
        raise ValidationError(f"theta must be positive, got {theta}")
    om = math.sqrt(1 + theta * theta)
    cands = [
        ((theta + (1 - om)) / 4, "perturbative"),
        ((theta - (1 - om)) / 4, "perturbative"),
        (((1 + om) - theta) / 4, "strong_coupling"),
        (((1 + om) + theta) / 4, "strong_coupling"),
    ]
    cands = sorted((c for c in cands if c[0] > 0), key=lambda c: c[0])
    return PerturbativePrediction(tuple(c[0] for c in cands), tuple(c[1] for c in cands))


def infer_field(g1: float, g2: float) -> FieldEstimate:
    if not 0 < g1 < g2:
        raise ValidationError(f"need 0 < g1 < g2, got g1={g1}, g2={g2}")
    return FieldEstimate(2 * (g1 + g2), g1, g2)


def _consistency(g1, g2):
    est = infer_field(g1, g2)
    pred = predict_peaks_g4(est.theta_hat).perturbative
    return abs(pred[0] - g1) + abs(pred[1] - g2)


def select_peak_pair(peaks: list[Peak], strategy: str = "smallest") -> tuple[float, float]:
    """Pick the two peak locations used for inversion.

    ``smallest`` takes the two lowest-g peaks.  ``consistent`` takes the pair
    whose implied field best reproduces the pair itself through
    :func:`predict_peaks_g4`; it skips the strong-coupling peak that overtakes
    the upper perturbative one once theta > 1.
    """
    locs = sorted(p.location for p in peaks if p.location > 0)
    if len(locs) < 2:
        raise InsufficientPeaksError(f"insufficient peaks: found {len(locs)}, need 2")
    if strategy == "smallest":
        return locs[0], locs[1]
    if strategy == "consistent":
        return min(itertools.combinations(locs, 2), key=lambda pair: _consistency(*pair))
    raise ValidationError(f"unknown strategy {strategy!r}")


def estimate_field(curve: ResponseCurve, min_prominence: float = DEFAULT_MIN_PROMINENCE,
                   strategy: str = "smallest") -> tuple[FieldEstimate, list[Peak]]:
    """Detect peaks in a g-sweep and invert them to a field estimate."""
    if curve.axis != "g":
        raise ValidationError(f"field inversion needs a g sweep, got axis {curve.axis!r}")
    peaks = detect_peaks(curve, min_prominence)
    g1, g2 = select_peak_pair(peaks, strategy)
    return infer_field(g1, g2), peaks
