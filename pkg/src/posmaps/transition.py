"""Transition matrices of a map relative to an orthonormal basis.

For a basis ``G = {g_j}`` the transition matrix has entries
``T[j, k] = <g_j| phi(|g_k><g_k|) |g_j>``. It is column stochastic whenever
``phi`` is positive and trace preserving, and for 2-positive maps
``tr(phi) <= d tr(T)`` for every basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DegenerateInputError,
    DimensionError,
    EigenvalueNotFoundError,
    NotHermiticityPreservingError,
)
from .spectral import BoundReport, InequalityId
from .superop import Superoperator, apply, as_square, choi, hermitize, trace_superop, unvec


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Columns of ``vectors`` are the basis vectors."""

    vectors: np.ndarray

    def __post_init__(self):
        g = as_square(self.vectors)
        gram = g.conj().T @ g
        if np.max(np.abs(gram - np.eye(g.shape[0]))) > 1e-12:
            raise ValueError("basis vectors are not orthonormal within 1e-12")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "vectors", g)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def standard(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.eye(dim, dtype=complex))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_basis(dim: int, rng: np.random.Generator) -> OrthonormalBasis:
    return OrthonormalBasis(haar_unitary(dim, rng))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def is_column_stochastic(self, atol: float = 1e-10) -> bool:
        return bool(
            np.all(self.entries >= -atol) and np.all(np.abs(self.column_sums() - 1) <= atol)
        )


def _basis_matrix(basis, dim: int) -> np.ndarray:
    g = basis.vectors if isinstance(basis, OrthonormalBasis) else as_square(basis)
    if g.shape[0] != dim:
        raise DimensionError(f"basis has dimension {g.shape[0]}, map acts on {dim}")
    return g


def transition_matrix(
    phi: Superoperator,
    basis,
    positive_tp: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> TransitionMatrix:
    """Transition matrix of ``phi`` in ``basis``.

    With ``positive_tp=True`` the caller vouches that ``phi`` is positive and
    trace preserving, and the result is checked to be column stochastic.
    """
    d = phi.dim
    g = _basis_matrix(basis, d)
    t = np.empty((d, d), dtype=complex)
    for k in range(d):
        out = apply(phi, np.outer(g[:, k], g[:, k].conj()))
        t[:, k] = np.einsum("aj,ab,bj->j", g.conj(), out, g)
    if np.max(np.abs(t.imag)) > tol.real_entries:
        raise NotHermiticityPreservingError("transition matrix has complex entries")
    tm = TransitionMatrix(t.real.copy())
    if positive_tp and not tm.is_column_stochastic(tol.real_entries):
        raise ValueError("transition matrix of a positive trace-preserving map is not column stochastic")
    return tm


def check_lemma_tg(phi: Superoperator, basis, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """``tr(phi) <= d tr(T_G)``; holds for every basis when phi is 2-positive."""
    lhs = trace_superop(phi, tol)
    rhs = phi.dim * transition_matrix(phi, basis, tol=tol).trace
    return BoundReport.upper(lhs, rhs, InequalityId.LEMMA_TG, tol.bound)


def pair_terms(phi: Superoperator, basis) -> list[tuple[int, int, float, float]]:
    """For all ``j < k``: ``(j, k, 2 Re <g_k|phi(|g_k><g_j|)|g_j>, T_jj + T_kk)``.

    The first value never exceeds the second when ``phi`` is 2-positive.
    """
    d = phi.dim
    g = _basis_matrix(basis, d)
    t = transition_matrix(phi, g).entries
    rows = []
    for j in range(d):
        for k in range(j + 1, d):
            off = g[:, k].conj() @ apply(phi, np.outer(g[:, k], g[:, j].conj())) @ g[:, j]
            rows.append((j, k, float(2 * off.real), float(t[j, j] + t[k, k])))
    return rows


def match_eigenvalue(phi: Superoperator, lam: float, tol: Tolerances = DEFAULT_TOL) -> tuple[int, complex, np.ndarray, np.ndarray]:
    """Nearest computed eigenvalue to ``lam``; ties go to the smallest index."""
    evals, evecs = np.linalg.eig(phi.transfer)
    dist = np.abs(evals - lam)
    idx = int(np.argmin(dist))
    if dist[idx] > tol.eigenvalue_match:
        raise EigenvalueNotFoundError(f"{lam} is not an eigenvalue (nearest {evals[idx]:.6g})")
    if abs(evals[idx].imag) > tol.imag_trace:
        raise EigenvalueNotFoundError(f"eigenvalue {evals[idx]} is not real")
    return idx, evals[idx], evals, evecs


def hermitian_eigenvector(phi: Superoperator, lam: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Nonzero Hermitian ``X`` with ``phi(X) = lam X`` for a real eigenvalue ``lam``.

    Each eigenvector ``Y`` in the cluster around ``lam`` is tried in turn:
    ``(Y + Y^dagger)/2`` if nonzero, otherwise ``(i/2)(Y - Y^dagger)``.
    """
    _, _, evals, evecs = match_eigenvalue(phi, lam, tol)
    d = phi.dim
    candidates = np.flatnonzero(np.abs(evals - lam) <= tol.eigenvalue_match)
    for idx in candidates:
        y = unvec(evecs[:, idx], d)
        for h in ((y + y.conj().T) / 2, 0.5j * (y - y.conj().T)):
            norm = np.linalg.norm(h)
            if norm < 1e-8:
                continue
            h = h / norm
            if np.linalg.norm(apply(phi, h) - lam * h) <= 1e-8:
                return (h + h.conj().T) / 2
    raise DegenerateInputError(f"no Hermitian eigenvector found for eigenvalue {lam}")


@dataclass(frozen=True, eq=False)
class EigenbasisCheck:
    report: BoundReport
    residual: float
    basis: OrthonormalBasis
    eigenvector: np.ndarray
    spectrum_weights: np.ndarray


def eigenbasis_transition_check(phi: Superoperator, lam: float, tol: Tolerances = DEFAULT_TOL) -> EigenbasisCheck:
    """Diagonalize a Hermitian eigenvector ``X = sum x_j |g_j><g_j|`` and verify
    ``T_G x = lam x`` in its eigenbasis, together with the transition bound."""
    x_mat = hermitian_eigenvector(phi, lam, tol)
    x, g = np.linalg.eigh(x_mat)
    basis = OrthonormalBasis(g)
    t = transition_matrix(phi, basis, tol=tol)
    residual = float(np.linalg.norm(t.entries @ x - lam * x))
    return EigenbasisCheck(check_lemma_tg(phi, basis, tol), residual, basis, x_mat, x)


# --- Schmidt-rank witnesses ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class SchmidtWitness:
    """Unit vector ``psi = sum_i left[i] kron right[i]`` of Schmidt rank <= k.

    ``left`` lives on the input factor of the Choi matrix and ``right`` on
    the output factor. ``value`` caches ``<psi| C(phi) |psi>`` when the witness
    comes out of a search.
    """

    left: np.ndarray
    right: np.ndarray
    value: float | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.left, dtype=complex))
        b = np.atleast_2d(np.asarray(self.right, dtype=complex))
        if a.shape != b.shape:
            raise DimensionError(f"left/right factor shapes differ: {a.shape} vs {b.shape}")
        norm = np.linalg.norm(self._combine(a, b))
        if norm == 0:
            raise ValueError("witness vector is zero")
        object.__setattr__(self, "left", a / norm)
        object.__setattr__(self, "right", b)

    @staticmethod
    def _combine(a, b):
        return sum(np.kron(a[i], b[i]) for i in range(a.shape[0]))

    @property
    def rank(self) -> int:
        return self.left.shape[0]

    @property
    def dim(self) -> int:
        return self.left.shape[1]

    @property
    def psi(self) -> np.ndarray:
        return self._combine(self.left, self.right)

    @classmethod
    def from_extension(cls, inputs, probes) -> "SchmidtWitness":
        """Witness equivalent to ``<phi_p| (id_k kron Phi)(|chi><chi|) |phi_p>``
        with ``chi = sum_a |a> kron inputs[a]`` and ``phi_p = sum_a |a> kron probes[a]``.

        The pairing equals ``<psi| C |psi>`` for ``psi = sum_a conj(inputs[a]) kron probes[a]``
        up to the squared norm of ``psi``.
        """
        return cls(np.conj(np.asarray(inputs)), np.asarray(probes))

    def to_dict(self) -> dict:
        def pairs(arr):
            return [[[float(z.real), float(z.imag)] for z in row] for row in arr]

        return {"rank": self.rank, "dim": self.dim, "left": pairs(self.left),
                "right": pairs(self.right), "value": self.value}


Rank2Witness = SchmidtWitness


def rank2_witness_value(phi: Superoperator, witness: SchmidtWitness) -> float:
    """``<psi| C(phi) |psi>`` for the (unit) witness vector."""
    if witness.dim != phi.dim:
        raise DimensionError(f"witness dimension {witness.dim} does not match map dimension {phi.dim}")
    psi = witness.psi
    return float((psi.conj() @ choi(phi).entries @ psi).real)


def lemma_pair_witness(basis, j: int, k: int) -> SchmidtWitness:
    """Rank-2 witness probing ``(id_2 kron phi)`` on ``|0>g_k + |1>g_j`` with
    probe ``|0>g_k - |1>g_j``; its value is nonnegative for 2-positive maps."""
    g = basis.vectors if isinstance(basis, OrthonormalBasis) else as_square(basis)
    return SchmidtWitness.from_extension([g[:, k], g[:, j]], [g[:, k], -g[:, j]])
