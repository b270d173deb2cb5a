"""Closed-form maps with known spectra.

* ``tt_map``: the Takasaki-Tomiyama family interpolating between the
  transpose (alpha = 0) and maps built from ``tr(X) I``, identity and transpose.
* ``tightness_map``: unitary conjugations that beat any coefficient c > d in
  place of d in the trace bound.
* ``pinch_flip_map``: a positive, not 2-positive qubit map whose transition
  matrices all have trace 4.
* ``sigma_x_transpose_map``: ``X -> sigma_x X^T sigma_x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import SpectrumReport
from .superop import (
    Superoperator,
    compose,
    conjugation_map,
    identity_map,
    superop_from_kraus,
    trace_map,
    transpose_map,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class TTParams:
    dim: int
    alpha: float

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def normalization(self) -> float:
        d, a = self.dim, self.alpha
        return 1 + a * (d - 2) * (d + 1)


def tt_map(params: TTParams) -> Superoperator:
    """``X -> [a(d-1) tr(X) I - a X + (1-a) X^T] / (1 + a(d-2)(d+1))``."""
    d, a = params.dim, params.alpha
    m = (a * (d - 1) * trace_map(d, np.eye(d)).transfer
         - a * identity_map(d).transfer
         + (1 - a) * transpose_map(d).transfer)
    return Superoperator(m / params.normalization)


def tt_trace(params: TTParams) -> float:
    return (1 - 2 * params.alpha) * params.dim / params.normalization


def tt_closed_spectrum(params: TTParams) -> SpectrumReport:
    d, n = params.dim, params.normalization
    ev = ([1.0]
          + [-1.0 / n] * (d * (d - 1) // 2)
          + [(1 - 2 * params.alpha) / n] * ((d - 1) * (d + 2) // 2))
    return SpectrumReport.from_eigenvalues(ev)


def tt_threshold(d: int) -> float:
    """Smallest alpha for which the trace bound holds for ``tt_map``."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return (3 - d) / ((d * d - 1) * (d - 2) + 2)


@dataclass(frozen=True)
class TightnessParams:
    dim: int
    c: float
    x: float
    alpha: float

    def __post_init__(self):
        if not self.c > self.dim:
            raise ValueError(f"need c > d, got c={self.c}, d={self.dim}")
        if not 0 < self.x < 1:
            raise ValueError("x must lie in (0, 1)")
        if tightness_f(self.x, self.dim, self.c) <= 0:
            raise ValueError("f(x) must be positive")

    @property
    def trace(self) -> float:
        return (self.dim - 2 + 2 * self.x) ** 2

    @property
    def min_re(self) -> float:
        return 2 * self.x ** 2 - 1


def tightness_f(x: float, d: int, c: float) -> float:
    return (4 - 2 * c) * x * x + (4 * d - 8) * x + (4 - 4 * d + 2 * c)


def rotation_map(d: int, alpha: float) -> Superoperator:
    """Conjugation by ``exp(i alpha (|0><0| - |1><1|))`` embedded in dimension d."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    phases = np.ones(d, dtype=complex)
    phases[0] = np.exp(1j * alpha)
    phases[1] = np.exp(-1j * alpha)
    return conjugation_map(np.diag(phases))


def tightness_map(d: int, c: float, max_halvings: int = 60) -> tuple[TightnessParams, Superoperator]:
    """Pick ``x = 1 - 2^-m`` for the smallest m with ``f(x) > 0`` and return the
    conjugation by ``exp(i arccos(x) (|0><0| - |1><1|))``."""
    if not c > d:
        raise ValueError(f"need c > d, got c={c}, d={d}")
    for m in range(1, max_halvings + 1):
        x = 1.0 - 2.0 ** -m
        if tightness_f(x, d, c) > 0:
            alpha = math.acos(x)
            return TightnessParams(d, c, x, alpha), rotation_map(d, alpha)
    raise ValueError(f"no admissible x found for d={d}, c={c}")


def pinch_flip_map() -> Superoperator:
    """``X -> 4 X_00 |0><0| + sigma_x X^T sigma_x`` on qubits."""
    e00 = np.zeros((2, 2), dtype=complex)
    e00[0, 0] = 1.0
    pinch = superop_from_kraus([2 * e00])
    return pinch + sigma_x_transpose_map()


def sigma_x_transpose_map() -> Superoperator:
    return compose(conjugation_map(SIGMA_X), transpose_map(2))


PINCH_FLIP_CHOI = np.array(
    [[4, 0, 0, 1],
     [0, 1, 0, 0],
     [0, 0, 1, 0],
     [1, 0, 0, 0]], dtype=complex)


def su2(phi: float, xi: float, omega: float) -> np.ndarray:
    """Special unitary ``[[cos(phi) e^{i xi}, sin(phi) e^{i omega}],
    [-sin(phi) e^{-i omega}, cos(phi) e^{-i xi}]]``."""
    return np.array([
        [math.cos(phi) * np.exp(1j * xi), math.sin(phi) * np.exp(1j * omega)],
        [-math.sin(phi) * np.exp(-1j * omega), math.cos(phi) * np.exp(-1j * xi)],
    ])


def pinch_flip_transition_closed(phi: float) -> np.ndarray:
    return np.array([[4 * math.cos(phi) ** 2, 1.0], [1.0, 4 * math.sin(phi) ** 2]])
