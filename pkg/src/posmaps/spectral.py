"""Spectra of superoperators and the map-level eigenvalue inequalities."""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionError, NumericalFailure
from .superop import Superoperator, require_trace_preserving, trace_superop


class InequalityId(str, enum.Enum):
    MAP_BOUND = "MAP_BOUND"
    TRIVIAL_BOUND = "TRIVIAL_BOUND"
    GEN_BOUND = "GEN_BOUND"
    RELAX_RATE = "RELAX_RATE"
    LEMMA_TG = "LEMMA_TG"
    OPTIMALITY = "OPTIMALITY"
    CONJECTURE = "CONJECTURE"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one inequality check.

    For the ordinary ``lhs <= rhs`` checks ``slack = rhs - lhs`` and the
    inequality counts as satisfied when ``slack >= -tolerance``. A *strict*
    report asserts ``lhs > rhs`` instead; then ``slack = lhs - rhs`` and it is
    satisfied when ``slack > tolerance``.
    """

    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    tolerance: float
    inequality_id: InequalityId
    strict: bool = False

    @classmethod
    def upper(cls, lhs: float, rhs: float, inequality_id: InequalityId, tolerance: float) -> "BoundReport":
        slack = rhs - lhs
        return cls(float(lhs), float(rhs), float(slack), bool(slack >= -tolerance), tolerance, inequality_id)

    @classmethod
    def strictly_above(cls, lhs: float, rhs: float, inequality_id: InequalityId, tolerance: float) -> "BoundReport":
        slack = lhs - rhs
        return cls(float(lhs), float(rhs), float(slack), bool(slack > tolerance), tolerance, inequality_id, True)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["inequality_id"] = self.inequality_id.value
        return out


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    min_re: float
    max_re: float
    spectral_radius: float
    trace: float

    @classmethod
    def from_eigenvalues(cls, eigenvalues) -> "SpectrumReport":
        ev = sort_eigenvalues(np.asarray(eigenvalues, dtype=complex))
        ev.flags.writeable = False
        return cls(
            eigenvalues=ev,
            min_re=float(ev.real.min()),
            max_re=float(ev.real.max()),
            spectral_radius=float(np.abs(ev).max()),
            trace=float(ev.sum().real),
        )

    def conjugation_closed(self, atol: float = 1e-8) -> bool:
        return multiset_close(self.eigenvalues, self.eigenvalues.conj(), atol)


def sort_eigenvalues(ev: np.ndarray) -> np.ndarray:
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def multiset_distance(a, b) -> float:
    """Max distance under the best matching of two equal-size multisets."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        return float("inf")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


def multiset_close(a, b, atol: float) -> bool:
    return multiset_distance(a, b) <= atol


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(matrix)
        raise NumericalFailure(f"eigensolver failed ({exc}); condition number {cond:.3e}") from exc


def spectrum(phi) -> SpectrumReport:
    """Spectrum of a superoperator (or of a raw square matrix)."""
    m = phi.transfer if isinstance(phi, Superoperator) else np.asarray(phi, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalFailure("matrix has non-finite entries")
    return SpectrumReport.from_eigenvalues(eigenvalues(m))


def check_map_bound(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``tr(phi) <= d min Re sigma(phi) + d^2 - d`` for a trace-preserving map.

    Only the inequality is evaluated; 2-positivity is not assumed or tested.
    """
    require_trace_preserving(phi, tol)
    d = phi.dim
    lhs = trace_superop(phi, tol)
    rhs = d * spectrum(phi).min_re + d * d - d
    return BoundReport.upper(lhs, rhs, InequalityId.MAP_BOUND, tol.bound)


def check_trivial_bound(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``tr(phi) <= min Re sigma(phi) + d^2 - 1``."""
    d = phi.dim
    lhs = trace_superop(phi, tol)
    rhs = spectrum(phi).min_re + d * d - 1
    return BoundReport.upper(lhs, rhs, InequalityId.TRIVIAL_BOUND, tol.bound)


def check_optimality(phi: Superoperator, c: float, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Strict violation ``tr(phi) > c min Re sigma(phi) + d^2 - c`` for ``c > d``.

    ``satisfied`` means the violation holds with margin above ``tol.strict``.
    """
    d = phi.dim
    if not c > d:
        raise ValueError(f"coefficient must exceed the dimension: c={c}, d={d}")
    lhs = trace_superop(phi, tol)
    rhs = c * spectrum(phi).min_re + d * d - c
    return BoundReport.strictly_above(lhs, rhs, InequalityId.OPTIMALITY, tol.strict)


def check_conjecture(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``tr(phi) <= d min Re sigma + (d^2 - d) max Re sigma``; no trace preservation needed."""
    d = phi.dim
    spec = spectrum(phi)
    lhs = trace_superop(phi, tol)
    rhs = d * spec.min_re + (d * d - d) * spec.max_re
    return BoundReport.upper(lhs, rhs, InequalityId.CONJECTURE, tol.bound)
