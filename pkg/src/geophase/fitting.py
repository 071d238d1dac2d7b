"""Least-squares fit of sinusoidal fringes ``y = offset + amplitude * cos(k x - phase)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitFailure


@dataclass(frozen=True)
class CosineFit:
    offset: float
    amplitude: float
    phase: float
    cov: np.ndarray  # order: offset, amplitude, phase
    harmonic: int = 1

    @property
    def maximum(self) -> float:
        return self.offset + self.amplitude

    @property
    def minimum(self) -> float:
        return self.offset - self.amplitude

    @property
    def amplitude_sigma(self) -> float:
        return math.sqrt(max(self.cov[1, 1], 0.0))

    def __call__(self, x):
        return self.offset + self.amplitude * np.cos(self.harmonic * np.asarray(x) - self.phase)


def fit_cosine(x, y, variance=None, min_significance: float = 3.0, harmonic: int = 1) -> CosineFit:
    """Fit ``offset + amplitude*cos(harmonic*x - phase)`` by linear least squares.

    The model is linear in ``(offset, p, q)`` with ``p cos kx + q sin kx``,
    so no iteration is needed. ``variance`` holds per-point variances
    (Poisson counts use the counts themselves); without it the fit is
    unweighted and the covariance is zero, as for exact synthetic data.

    Raises FitFailure for fewer than three points or when the amplitude is
    not ``min_significance`` standard deviations away from zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < 3:
        raise FitFailure(f"{len(x)} points cannot determine 3 fringe parameters")

    kx = harmonic * x
    design = np.column_stack([np.ones_like(x), np.cos(kx), np.sin(kx)])
    if variance is None:
        w = np.ones_like(y)
    else:
        w = 1.0 / np.maximum(np.asarray(variance, dtype=float), 1.0)
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
    if np.linalg.matrix_rank(design) < 3:
        raise FitFailure("sample grid does not resolve cos and sin components")
    a, p, q = coef
    amp = math.hypot(p, q)
    phase = math.atan2(q, p)

    if variance is None:
        lin_cov = np.zeros((3, 3))
    else:
        lin_cov = np.linalg.inv(design.T @ (design * w[:, None]))
    # (a, p, q) -> (a, amp, phase)
    jac = np.zeros((3, 3))
    jac[0, 0] = 1.0
    if amp > 0:
        jac[1, 1:] = [p / amp, q / amp]
        jac[2, 1:] = [-q / amp**2, p / amp**2]
    cov = jac @ lin_cov @ jac.T

    scale = max(abs(a), 1.0)
    if variance is None:
        significant = amp > 1e-12 * scale
    else:
        significant = amp > min_significance * math.sqrt(cov[1, 1])
    if not significant:
        raise FitFailure(f"fringe amplitude {amp:.3g} indistinguishable from zero")
    return CosineFit(float(a), float(amp), float(phase), cov, harmonic)
