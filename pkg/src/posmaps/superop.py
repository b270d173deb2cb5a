"""Linear maps on d x d complex matrices.

A map is stored as its d^2 x d^2 transfer matrix ``M`` acting on
column-stacked vectors, ``vec(phi(X)) = M @ vec(X)``. With this convention
``vec(A X B) = (B^T kron A) vec(X)``, so a Kraus operator ``K`` contributes
``conj(K) kron K`` and the trace of the map is ``trace(M)``.

The Choi matrix places ``phi(|j><k|)`` in block row ``j``, block column ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DegenerateInputError,
    DimensionError,
    NotHermiticityPreservingError,
    NotPositiveDefiniteError,
    NotTracePreservingError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _int_sqrt(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 1:
        raise DimensionError(f"{n} is not a positive perfect square")
    return d


def as_square(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a complex square matrix, optionally of size ``dim``."""
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} matrix, got {a.shape[0]}x{a.shape[1]}")
    return a


def hermiticity_gap(x: np.ndarray) -> float:
    return float(np.max(np.abs(x - x.conj().T)))


def is_hermitian(x, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = as_square(x)
    scale = float(np.max(np.abs(a)))
    return hermiticity_gap(a) <= max(tol.hermiticity_rel * scale, tol.hermiticity_floor)


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = _int_sqrt(v.size)
    return v.reshape((dim, dim), order="F")


def ket_bra(j: int, k: int, dim: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=complex)
    e[j, k] = 1.0
    return e


@dataclass(frozen=True, eq=False)
class Superoperator:
    """A linear map on ``dim x dim`` matrices, held as its transfer matrix."""

    transfer: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.transfer)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"transfer matrix must be square, got {m.shape}")
        _int_sqrt(m.shape[0])
        object.__setattr__(self, "transfer", _frozen(m))

    @property
    def dim(self) -> int:
        return _int_sqrt(self.transfer.shape[0])

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return compose(self, other)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        _same_dim(self, other)
        return Superoperator(self.transfer + other.transfer)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        _same_dim(self, other)
        return Superoperator(self.transfer - other.transfer)

    def __mul__(self, s) -> "Superoperator":
        return Superoperator(complex(s) * self.transfer)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Superoperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """``sum_{jk} |j><k| kron phi(|j><k|)`` as a d^2 x d^2 array."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.entries)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionError(f"Choi matrix must be square, got {c.shape}")
        _int_sqrt(c.shape[0])
        object.__setattr__(self, "entries", _frozen(c))

    @property
    def dim(self) -> int:
        return _int_sqrt(self.entries.shape[0])

    def block(self, j: int, k: int) -> np.ndarray:
        d = self.dim
        return self.entries[j * d:(j + 1) * d, k * d:(k + 1) * d]

    def __repr__(self) -> str:
        return f"ChoiMatrix(dim={self.dim})"


def _same_dim(a: Superoperator, b: Superoperator) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"maps act on different dimensions: {a.dim} vs {b.dim}")


# --- constructors -----------------------------------------------------------

def superop_from_kraus(kraus: Sequence) -> Superoperator:
    """Completely positive map ``X -> sum_i K_i X K_i^dagger``."""
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise DimensionError("need at least one Kraus operator")
    d = as_square(ops[0]).shape[0]
    m = np.zeros((d * d, d * d), dtype=complex)
    for k in ops:
        k = as_square(k, d)
        m += np.kron(k.conj(), k)
    return Superoperator(m)


def conjugation_map(a) -> Superoperator:
    """``X -> A X A^dagger``."""
    return superop_from_kraus([a])


def identity_map(dim: int) -> Superoperator:
    return Superoperator(np.eye(dim * dim))


def transpose_map(dim: int) -> Superoperator:
    # vec(X^T)[a + b d] = X[b, a] = vec(X)[b + a d]
    d = dim
    m = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            m[a + b * d, b + a * d] = 1.0
    return Superoperator(m)


def trace_map(dim: int, output) -> Superoperator:
    """``X -> tr(X) * output``."""
    out = as_square(output, dim)
    return Superoperator(np.outer(vec(out), vec(np.eye(dim))))


def depolarizing_map(dim: int) -> Superoperator:
    """Completely depolarizing channel ``X -> tr(X) I/d``."""
    return trace_map(dim, np.eye(dim) / dim)


def compose(outer: Superoperator, inner: Superoperator) -> Superoperator:
    """``outer o inner``."""
    _same_dim(outer, inner)
    return Superoperator(outer.transfer @ inner.transfer)


def from_action(fn, dim: int) -> Superoperator:
    """Tabulate an arbitrary linear function of matrices as a superoperator."""
    m = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for k in range(dim):
            m[:, j + k * dim] = vec(as_square(fn(ket_bra(j, k, dim)), dim))
    return Superoperator(m)


# --- action and representations ---------------------------------------------

def apply(phi: Superoperator, x) -> np.ndarray:
    x = as_square(x, phi.dim)
    return unvec(phi.transfer @ vec(x), phi.dim)


def _swap_outer(t: np.ndarray, d: int) -> np.ndarray:
    # transfer[a + b d, j + k d] <-> choi[j d + a, k d + b]; axes 0 and 3 swap
    return t.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def choi(phi: Superoperator) -> ChoiMatrix:
    return ChoiMatrix(_swap_outer(phi.transfer, phi.dim))


def from_choi(c) -> Superoperator:
    if not isinstance(c, ChoiMatrix):
        c = ChoiMatrix(c)
    return Superoperator(_swap_outer(c.entries, c.dim))


def choi_output_partial_trace(c: ChoiMatrix) -> np.ndarray:
    """Trace out the output factor; equals the identity iff the map is TP."""
    d = c.dim
    return np.einsum("jaka->jk", c.entries.reshape(d, d, d, d))


def trace_superop(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> float:
    """Trace of the map; must be real for Hermiticity-preserving input."""
    t = complex(np.trace(phi.transfer))
    if abs(t.imag) > tol.imag_trace:
        raise NotHermiticityPreservingError(
            f"trace has imaginary part {t.imag:.3e}; map is not Hermiticity-preserving"
        )
    return t.real


def trace_in_basis(phi: Superoperator, basis) -> complex:
    """``sum_{j,k} <g_k| phi(|g_k><g_j|) |g_j>`` for the columns ``g`` of ``basis``."""
    g = as_square(basis, phi.dim)
    total = 0j
    for j in range(phi.dim):
        for k in range(phi.dim):
            out = apply(phi, np.outer(g[:, k], g[:, j].conj()))
            total += g[:, k].conj() @ out @ g[:, j]
    return total


# --- structural tests -------------------------------------------------------

_IDENTITY_VEC_CACHE: dict[int, np.ndarray] = {}


def _vec_identity(d: int) -> np.ndarray:
    if d not in _IDENTITY_VEC_CACHE:
        _IDENTITY_VEC_CACHE[d] = vec(np.eye(d))
    return _IDENTITY_VEC_CACHE[d]


def tp_defect(phi: Superoperator) -> float:
    """Max-abs entry of ``phi^dagger(I) - I``."""
    w = _vec_identity(phi.dim)
    return float(np.max(np.abs(w @ phi.transfer - w)))


def is_trace_preserving(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> bool:
    return tp_defect(phi) <= tol.trace_preserving


def is_hermiticity_preserving(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> bool:
    return is_hermitian(choi(phi).entries, tol)


def require_trace_preserving(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> None:
    gap = tp_defect(phi)
    if gap > tol.trace_preserving:
        raise NotTracePreservingError(f"map is not trace-preserving (defect {gap:.3e})")


# --- adjoints ---------------------------------------------------------------

def hs_adjoint(phi: Superoperator) -> Superoperator:
    """Adjoint with respect to ``<A, B> = tr(A^dagger B)``."""
    return Superoperator(phi.transfer.conj().T)


def _positive_powers(omega, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    w = as_square(omega)
    if not is_hermitian(w, tol):
        raise NotPositiveDefiniteError("omega is not Hermitian", float("nan"))
    evals, evecs = np.linalg.eigh((w + w.conj().T) / 2)
    if evals[0] <= tol.positive_definite:
        raise NotPositiveDefiniteError("omega must be strictly positive definite", float(evals[0]))
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    inv_root = (evecs / np.sqrt(evals)) @ evecs.conj().T
    return root, inv_root


def omega_adjoint(phi: Superoperator, omega, tol: Tolerances = DEFAULT_TOL) -> Superoperator:
    """Adjoint of ``phi`` for the weighted product ``tr(A^dagger w^-1/2 B w^-1/2)``.

    Equals ``w^1/2 phi^dagger(w^-1/2 (.) w^-1/2) w^1/2``. If ``phi`` is trace
    preserving and fixes ``omega``, the result is trace preserving and fixes
    ``omega`` as well.
    """
    root, inv_root = _positive_powers(omega, tol)
    outer = np.kron(root.T, root)
    inner = np.kron(inv_root.T, inv_root)
    return Superoperator(outer @ phi.transfer.conj().T @ inner)


def omega_symmetrization(phi: Superoperator, omega, tol: Tolerances = DEFAULT_TOL) -> Superoperator:
    """``(phi + phi^#) / 2``; self-adjoint in the omega-weighted product."""
    return 0.5 * (phi + omega_adjoint(phi, omega, tol))


def mix_depolarizing(phi: Superoperator, lam: float) -> Superoperator:
    """Convex mixture ``(1 - lam) phi + lam tr(.) I/d``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {lam}")
    return Superoperator((1 - lam) * phi.transfer + lam * depolarizing_map(phi.dim).transfer)


# --- fixed points -----------------------------------------------------------

def hermitize(y: np.ndarray, floor: float = 1e-12) -> np.ndarray | None:
    """Hermitian part ``(Y + Y^dagger)/2`` or, if that has negligible trace,
    ``(i/2)(Y - Y^dagger)``. Returns None when both are negligible."""
    h = (y + y.conj().T) / 2
    if abs(np.trace(h)) >= floor:
        return h
    h = 0.5j * (y - y.conj().T)
    if abs(np.trace(h)) >= floor:
        return h
    return None


def eigenspace_projector(m: np.ndarray, value: complex, radius: float) -> np.ndarray | None:
    """Spectral projector of ``m`` for the eigenvalues within ``radius`` of ``value``.

    Built from right and left eigenvectors as ``R (L^dagger R)^-1 L^dagger``.
    Returns None if no eigenvalue is close enough.
    """
    evals, left, right = scipy.linalg.eig(m, left=True, right=True)
    mask = np.abs(evals - value) <= radius
    if not np.any(mask):
        return None
    r = right[:, mask]
    l = left[:, mask]
    return r @ np.linalg.solve(l.conj().T @ r, l.conj().T)


def fixed_point(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A trace-one Hermitian fixed point of a positive trace-preserving map.

    The maximally mixed state is projected onto the eigenvalue-1 eigenspace,
    which for positive trace-preserving maps yields a state even when the
    eigenspace is degenerate. The projection is Hermitized and normalized.
    """
    d = phi.dim
    proj = eigenspace_projector(phi.transfer, 1.0, tol.fixed_point_radius)
    if proj is None:
        raise NotTracePreservingError("no eigenvalue within tolerance of 1")
    y = unvec(proj @ vec(np.eye(d) / d), d)
    h = hermitize(y)
    if h is None:
        # fall back to individual eigenvectors of the cluster
        evals, vecs = np.linalg.eig(phi.transfer)
        for idx in np.flatnonzero(np.abs(evals - 1.0) <= tol.fixed_point_radius):
            h = hermitize(unvec(vecs[:, idx], d))
            if h is not None:
                break
    if h is None:
        raise DegenerateInputError("eigenvalue-1 eigenspace has no Hermitian element with nonzero trace")
    h = h / np.trace(h).real
    return (h + h.conj().T) / 2


def positive_sqrt_inv(a, floor: float = 0.0) -> np.ndarray:
    """``A^{-1/2}`` for Hermitian positive definite ``A``."""
    evals, evecs = np.linalg.eigh(as_square(a))
    if evals[0] <= floor:
        raise NotPositiveDefiniteError("matrix is not positive definite", float(evals[0]))
    return (evecs / np.sqrt(evals)) @ evecs.conj().T

