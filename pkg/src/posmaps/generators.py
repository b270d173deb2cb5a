"""GKSL generators, their semigroups and relaxation-rate bounds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOL, Tolerances
from .errors import NumericalFailure
from .positivity import make_rng
from .spectral import BoundReport, InequalityId, spectrum
from .superop import Superoperator, _frozen, as_square, is_hermitian, trace_superop, vec


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """``L(rho) = -i[H, rho] + sum_k g_k (V_k rho V_k^dagger - {V_k^dagger V_k, rho}/2)``."""

    hamiltonian: np.ndarray
    jumps: tuple
    rates: tuple
    transfer: np.ndarray

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def superop(self) -> Superoperator:
        return Superoperator(self.transfer)

    def trace_annihilation_defect(self) -> float:
        w = vec(np.eye(self.dim))
        return float(np.max(np.abs(w @ self.transfer)))

    def to_dict(self) -> dict:
        def pairs(m):
            return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel()]

        return {
            "dim": self.dim,
            "H": pairs(self.hamiltonian),
            "jumps": [pairs(v) for v in self.jumps],
            "rates": [float(g) for g in self.rates],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        d = int(data["dim"])

        def unpairs(p):
            a = np.asarray(p, dtype=float)
            return (a[:, 0] + 1j * a[:, 1]).reshape(d, d)

        return gksl_generator(unpairs(data["H"]), [unpairs(v) for v in data["jumps"]], data["rates"])


def gksl_generator(h, jumps: Sequence = (), rates: Sequence[float] | None = None,
                   tol: Tolerances = DEFAULT_TOL) -> GeneratorSpec:
    h = as_square(h)
    d = h.shape[0]
    if not is_hermitian(h, tol):
        raise ValueError("Hamiltonian must be Hermitian")
    jumps = [as_square(v, d) for v in jumps]
    rates = [1.0] * len(jumps) if rates is None else [float(g) for g in rates]
    if len(rates) != len(jumps):
        raise ValueError("need one rate per jump operator")
    if any(g < 0 for g in rates):
        raise ValueError(f"rates must be nonnegative, got {rates}")
    eye = np.eye(d)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for v, g in zip(jumps, rates):
        vv = v.conj().T @ v
        m += g * (np.kron(v.conj(), v) - 0.5 * np.kron(eye, vv) - 0.5 * np.kron(vv.T, eye))
    frozen = tuple(_frozen(v) for v in jumps)
    return GeneratorSpec(_frozen(h), frozen, tuple(rates), _frozen(m))


def semigroup(gen: GeneratorSpec, t: float) -> Superoperator:
    """``exp(t L)`` by scaling and squaring with Pade approximants."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    m = scipy.linalg.expm(t * gen.transfer)
    if not np.all(np.isfinite(m)):
        raise NumericalFailure(f"matrix exponential overflowed at t={t}, |L|={np.linalg.norm(gen.transfer):.3e}")
    return Superoperator(m)


def check_generator_bound(gen: GeneratorSpec, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``tr(L) <= d min Re sigma(L)``."""
    lhs = trace_superop(gen.superop, tol)
    rhs = gen.dim * spectrum(gen.transfer).min_re
    return BoundReport.upper(lhs, rhs, InequalityId.GEN_BOUND, tol.bound)


@dataclass(frozen=True, eq=False)
class RelaxationReport:
    rates: np.ndarray
    max_rate: float
    mean_bound: float
    satisfied: bool

    def as_bound(self, tolerance: float = 1e-9) -> BoundReport:
        return BoundReport.upper(self.max_rate, self.mean_bound, InequalityId.RELAX_RATE, tolerance)


def relaxation_rates(gen: GeneratorSpec, tol: Tolerances = DEFAULT_TOL) -> RelaxationReport:
    """Rates ``-Re(lambda_j)``; every rate must stay below ``(1/d) sum_k rate_k``."""
    ev = spectrum(gen.transfer).eigenvalues
    rates = np.sort(-ev.real)
    max_rate = float(rates.max())
    mean_bound = float(rates.sum() / gen.dim)
    return RelaxationReport(rates, max_rate, mean_bound, bool(max_rate <= mean_bound + tol.bound))


@dataclass(frozen=True)
class LimitRow:
    n: int
    trace_residual: float
    min_re_residual: float


def limit_formula_check(gen: GeneratorSpec, n_list: Sequence[int]) -> list[LimitRow]:
    """Residuals of ``n (tr e^{L/n} - d^2) -> tr L`` and
    ``n (min Re sigma(e^{L/n}) - 1) -> min Re sigma(L)``."""
    d2 = gen.dim ** 2
    tr_l = float(np.trace(gen.transfer).real)
    min_re_l = spectrum(gen.transfer).min_re
    rows = []
    for n in n_list:
        if n < 1:
            raise ValueError("n must be a positive integer")
        step = semigroup(gen, 1.0 / n)
        r1 = abs(n * (float(np.trace(step.transfer).real) - d2) - tr_l)
        r2 = abs(n * (spectrum(step).min_re - 1.0) - min_re_l)
        rows.append(LimitRow(int(n), r1, r2))
    return rows


def random_gksl(dim: int, seed: int, index: int = 0, n_jumps: int | None = None) -> GeneratorSpec:
    """Gaussian Hermitian H, ``n_jumps`` complex Gaussian jumps (default d^2),
    rates uniform in (0, 1]."""
    rng = make_rng(seed, index, 0)
    r = dim * dim if n_jumps is None else n_jumps
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (z + z.conj().T) / 2
    jumps = [(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
             for _ in range(r)]
    rates = 1.0 - rng.uniform(size=r)
    return gksl_generator(h, jumps, rates)


def dephasing_generator(gamma: float) -> GeneratorSpec:
    return gksl_generator(np.zeros((2, 2)), [np.diag([1.0, -1.0])], [gamma])


def amplitude_damping_generator(gamma: float) -> GeneratorSpec:
    return gksl_generator(np.zeros((2, 2)), [np.array([[0.0, 1.0], [0.0, 0.0]])], [gamma])
