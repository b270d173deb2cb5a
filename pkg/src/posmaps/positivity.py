"""Positivity classes of linear maps and random map ensembles.

Complete positivity is decided exactly from the Choi spectrum. k-positivity
for k < d is only *falsified*: a seesaw search looks for a unit vector of
Schmidt rank <= k with ``<psi| C(phi) |psi> < 0``. Failing to find one is
evidence, not a certificate.

Random draws use numpy's Philox counter-based generator keyed through a
``SeedSequence(seed, spawn_key=(sample_index, attempt))``, so every sample is
reproducible from ``(seed, index)`` alone and independent of scan order.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import NotPositiveDefiniteError
from .superop import (
    ChoiMatrix,
    Superoperator,
    choi,
    choi_output_partial_trace,
    compose,
    conjugation_map,
    from_choi,
    hs_adjoint,
    is_hermiticity_preserving,
    is_trace_preserving,
    positive_sqrt_inv,
    superop_from_kraus,
    transpose_map,
    unvec,
    vec,
)
from .transition import SchmidtWitness, haar_unitary

log = logging.getLogger(__name__)

RNG_ALGORITHM = "philox4x64-10/seedsequence"


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox stream for ``seed`` and a path of sub-keys (sample index, attempt, ...)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


# --- complete positivity ----------------------------------------------------

class CPTest(NamedTuple):
    is_cp: bool
    min_eigenvalue: float


def is_cp(phi: Superoperator, tol: Tolerances = DEFAULT_TOL) -> CPTest:
    """Choi criterion; the minimum Choi eigenvalue is returned for diagnostics."""
    c = choi(phi).entries
    herm = (c + c.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    if not is_hermiticity_preserving(phi, tol):
        return CPTest(False, min_eig)
    return CPTest(min_eig >= -tol.cp, min_eig)


# --- seesaw falsifier ---------------------------------------------------------

@dataclass
class SeesawRun:
    value: float
    left: np.ndarray
    right: np.ndarray
    history: list[float]
    converged: bool


def _reduced_left(c4: np.ndarray, q: np.ndarray) -> np.ndarray:
    # right factor fixed to orthonormal columns q; unknowns a[l, j]
    d, k = q.shape
    h = np.einsum("al,jakb,bm->ljmk", q.conj(), c4, q)
    return h.reshape(k * d, k * d)


def _reduced_right(c4: np.ndarray, q: np.ndarray) -> np.ndarray:
    d, k = q.shape
    h = np.einsum("jl,jakb,km->lamb", q.conj(), c4, q)
    return h.reshape(k * d, k * d)


def _min_eigvec(h: np.ndarray) -> tuple[float, np.ndarray]:
    h = (h + h.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return float(w[0]), v[:, 0]


def seesaw(
    c: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    max_iter: int = 500,
    conv_tol: float = 1e-12,
) -> SeesawRun:
    """Alternating minimization of ``<psi|c|psi>`` over ``psi = sum_i left[i] kron right[i]``.

    Each half-step orthonormalizes the fixed side and solves the other side
    exactly as a minimal eigenvector, so the objective never increases.
    """
    d2 = c.shape[0]
    d = int(round(np.sqrt(d2)))
    c4 = ((c + c.conj().T) / 2).reshape(d, d, d, d)
    a = np.array(left, dtype=complex)
    b = np.array(right, dtype=complex)
    k = a.shape[0]
    history: list[float] = []
    prev = np.inf
    converged = False
    for _ in range(max_iter):
        q, r = np.linalg.qr(b.T)
        val, x = _min_eigvec(_reduced_left(c4, q))
        a, b = x.reshape(k, d), q.T
        history.append(val)
        q, r = np.linalg.qr(a.T)
        val, x = _min_eigvec(_reduced_right(c4, q))
        a, b = q.T, x.reshape(k, d)
        history.append(val)
        if prev - val < conv_tol:
            converged = True
            break
        prev = val
    return SeesawRun(history[-1], a, b, history, converged)


def _spectral_start(c: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    d = int(round(np.sqrt(c.shape[0])))
    _, v = np.linalg.eigh((c + c.conj().T) / 2)
    u, s, vh = np.linalg.svd(v[:, 0].reshape(d, d))
    return (u[:, :k] * s[:k]).T, vh[:k]


@dataclass
class FalsificationResult:
    k: int
    min_value: float
    witness: SchmidtWitness | None
    best: SchmidtWitness
    converged: bool
    restarts: int
    seed: int

    @property
    def falsified(self) -> bool:
        return self.witness is not None


def falsify_k_positivity(
    phi: Superoperator,
    k: int,
    restarts: int = 50,
    seed: int = 0,
    max_iter: int = 500,
    conv_tol: float = 1e-12,
    tol: Tolerances = DEFAULT_TOL,
) -> FalsificationResult:
    """Search for a Schmidt-rank-<=k vector on which the Choi matrix is negative.

    The first start is the best rank-k truncation of the minimal Choi
    eigenvector; the remaining ``restarts - 1`` starts are seeded Gaussian
    draws. A minimum below ``-tol.witness_certify`` is returned as a witness
    and certifies that ``phi`` is not k-positive.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if k < 1:
        raise ValueError("k must be at least 1")
    d = phi.dim
    k_eff = min(k, d)
    c = choi(phi).entries
    best: SeesawRun | None = None
    all_converged = True
    for r in range(restarts):
        if r == 0:
            a0, b0 = _spectral_start(c, k_eff)
        else:
            rng = make_rng(seed, r)
            a0 = rng.standard_normal((k_eff, d)) + 1j * rng.standard_normal((k_eff, d))
            b0 = rng.standard_normal((k_eff, d)) + 1j * rng.standard_normal((k_eff, d))
        run = seesaw(c, a0, b0, max_iter=max_iter, conv_tol=conv_tol)
        all_converged &= run.converged
        if best is None or run.value < best.value:
            best = run
    assert best is not None
    best_witness = SchmidtWitness(best.left, best.right, best.value)
    witness = best_witness if best.value < -tol.witness_certify else None
    return FalsificationResult(k, best.value, witness, best_witness, all_converged, restarts, seed)


@dataclass
class PositivityVerdict:
    is_tp: bool
    is_hp: bool
    is_cp: bool
    min_choi_eigenvalue: float
    k1_witness: SchmidtWitness | None
    k2_witness: SchmidtWitness | None
    min_found_k1: float | None
    min_found_k2: float | None
    restarts: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "is_tp": self.is_tp,
            "is_hp": self.is_hp,
            "is_cp": self.is_cp,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "min_found_k1": self.min_found_k1,
            "min_found_k2": self.min_found_k2,
            "k1_witness": None if self.k1_witness is None else self.k1_witness.to_dict(),
            "k2_witness": None if self.k2_witness is None else self.k2_witness.to_dict(),
            "not_positive": self.k1_witness is not None,
            "not_2_positive": self.k2_witness is not None,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def classify(phi: Superoperator, restarts: int = 50, seed: int = 0,
             tol: Tolerances = DEFAULT_TOL) -> PositivityVerdict:
    cp = is_cp(phi, tol)
    k1 = falsify_k_positivity(phi, 1, restarts, seed, tol=tol)
    k2 = falsify_k_positivity(phi, 2, restarts, seed, tol=tol)
    return PositivityVerdict(
        is_tp=is_trace_preserving(phi, tol),
        is_hp=is_hermiticity_preserving(phi, tol),
        is_cp=cp.is_cp,
        min_choi_eigenvalue=cp.min_eigenvalue,
        k1_witness=k1.witness,
        k2_witness=k2.witness,
        min_found_k1=k1.min_value,
        min_found_k2=k2.min_value,
        restarts=restarts,
        seed=seed,
    )


# --- ensembles ----------------------------------------------------------------

class EnsembleId(str, enum.Enum):
    CPTP_GINIBRE = "CPTP_GINIBRE"
    DECOMPOSABLE = "DECOMPOSABLE"
    UNITARY = "UNITARY"
    CP_GINIBRE = "CP_GINIBRE"
    GKSL = "GKSL"

    def __str__(self) -> str:
        return self.value


ENSEMBLE_ALIASES = {
    "cptp": EnsembleId.CPTP_GINIBRE,
    "decomposable": EnsembleId.DECOMPOSABLE,
    "unitary": EnsembleId.UNITARY,
    "cp": EnsembleId.CP_GINIBRE,
    "generators": EnsembleId.GKSL,
    "gksl": EnsembleId.GKSL,
}


def parse_ensemble(name: str) -> EnsembleId:
    key = name.strip()
    if key.lower() in ENSEMBLE_ALIASES:
        return ENSEMBLE_ALIASES[key.lower()]
    return EnsembleId(key.upper())


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of a seeded random ensemble.

    ``kraus_rank`` is the Choi rank of CPTP/CP draws and of the CP part of a
    decomposable draw; ``transpose_rank`` is the rank of the part composed with
    the transpose. ``None`` means "draw uniformly per sample". For GKSL draws
    ``kraus_rank`` is the number of jump operators (default d^2).
    """

    dim: int
    count: int = 1
    seed: int = 0
    ensemble_id: EnsembleId = EnsembleId.CPTP_GINIBRE
    kraus_rank: int | None = None
    transpose_rank: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "ensemble_id", parse_ensemble(str(self.ensemble_id)))
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        d2 = self.dim * self.dim
        lo = 0 if self.ensemble_id is EnsembleId.DECOMPOSABLE else 1
        for name in ("kraus_rank", "transpose_rank"):
            r = getattr(self, name)
            if r is not None and not lo <= r <= d2:
                raise ValueError(f"{name} must lie in [{lo}, {d2}], got {r}")
        if self.ensemble_id is EnsembleId.DECOMPOSABLE and self.kraus_rank == 0 and self.transpose_rank == 0:
            raise ValueError("decomposable ensemble needs at least one nonzero part")

    def to_dict(self) -> dict:
        return {"dim": self.dim, "count": self.count, "seed": self.seed,
                "ensemble_id": self.ensemble_id.value, "kraus_rank": self.kraus_rank,
                "transpose_rank": self.transpose_rank, "rng": RNG_ALGORITHM}

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleConfig":
        keys = {"dim", "count", "seed", "ensemble_id", "kraus_rank", "transpose_rank"}
        return cls(**{k: v for k, v in data.items() if k in keys})

    @classmethod
    def from_file(cls, path) -> "EnsembleConfig":
        path = Path(path)
        if path.suffix.lower() == ".toml":
            import tomli

            with path.open("rb") as fh:
                data = tomli.load(fh)
        else:
            data = json.loads(path.read_text())
        return cls.from_dict(data.get("ensemble", data))


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_kraus(dim: int, rank: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [_ginibre(rng, (dim, dim)) for _ in range(rank)]


def _rank_or_draw(rank: int | None, lo: int, hi: int, rng: np.random.Generator) -> int:
    return int(rng.integers(lo, hi + 1)) if rank is None else rank


def _require(config: EnsembleConfig, *allowed: EnsembleId) -> None:
    if config.ensemble_id not in allowed:
        raise ValueError(f"ensemble {config.ensemble_id} cannot be drawn by this sampler")


MAX_ATTEMPTS = 64


def sample_cptp(config: EnsembleConfig, index: int = 0) -> Superoperator:
    """Random channel from a Ginibre Choi matrix ``G G^dagger`` of prescribed rank,
    renormalized by ``(Q^-1/2 kron I)`` with ``Q`` its output partial trace."""
    _require(config, EnsembleId.CPTP_GINIBRE)
    d = config.dim
    for attempt in range(MAX_ATTEMPTS):
        rng = make_rng(config.seed, index, attempt)
        rank = _rank_or_draw(config.kraus_rank, d * d, d * d, rng)
        g = _ginibre(rng, (d * d, rank))
        c = g @ g.conj().T
        q = choi_output_partial_trace(ChoiMatrix(c))
        try:
            s = positive_sqrt_inv((q + q.conj().T) / 2, floor=1e-12)
        except NotPositiveDefiniteError:
            log.warning("singular partial trace at sample %d attempt %d; resampling", index, attempt)
            continue
        norm = np.kron(s, np.eye(d))
        return from_choi(norm @ c @ norm)
    raise RuntimeError("could not draw a CPTP sample")


def sample_cp(config: EnsembleConfig, index: int = 0) -> Superoperator:
    """Completely positive map with Ginibre Choi matrix, not trace preserving."""
    _require(config, EnsembleId.CP_GINIBRE)
    d = config.dim
    rng = make_rng(config.seed, index, 0)
    rank = _rank_or_draw(config.kraus_rank, d * d, d * d, rng)
    g = _ginibre(rng, (d * d, rank))
    return from_choi(g @ g.conj().T / d)


def sample_unitary(config: EnsembleConfig, index: int = 0) -> Superoperator:
    _require(config, EnsembleId.UNITARY)
    return conjugation_map(haar_unitary(config.dim, make_rng(config.seed, index, 0)))


def decomposable_from_parts(cp_part: Superoperator, transposed_part: Superoperator,
                            floor: float = 1e-10) -> Superoperator:
    """Trace-preserving normalization of ``cp_part + transposed_part o T``.

    With ``A = phi^dagger(I)`` the map ``X -> phi(A^-1/2 X A^-1/2)`` is trace
    preserving and still decomposable.
    """
    d = cp_part.dim
    phi = cp_part + compose(transposed_part, transpose_map(d))
    a = unvec(hs_adjoint(phi).transfer @ vec(np.eye(d)), d)
    s = positive_sqrt_inv((a + a.conj().T) / 2, floor=floor)
    return compose(phi, conjugation_map(s))


def sample_decomposable(config: EnsembleConfig, index: int = 0) -> Superoperator:
    """Random trace-preserving decomposable map.

    Ranks default to a uniform draw (0..d^2 for the CP part, 1..d^2 for the
    transposed part), and the two parts get a uniform relative weight.
    """
    _require(config, EnsembleId.DECOMPOSABLE)
    d = config.dim
    zero = Superoperator(np.zeros((d * d, d * d)))
    for attempt in range(MAX_ATTEMPTS):
        rng = make_rng(config.seed, index, attempt)
        r1 = _rank_or_draw(config.kraus_rank, 0, d * d, rng)
        r2 = _rank_or_draw(config.transpose_rank, 1, d * d, rng)
        w = rng.uniform()
        phi1 = w * superop_from_kraus(random_kraus(d, r1, rng)) if r1 else zero
        phi2 = (1 - w) * superop_from_kraus(random_kraus(d, r2, rng)) if r2 else zero
        try:
            return decomposable_from_parts(phi1, phi2)
        except NotPositiveDefiniteError:
            log.warning("rank-deficient normalization at sample %d attempt %d; resampling", index, attempt)
    raise RuntimeError("could not draw a decomposable sample")


def sample(config: EnsembleConfig, index: int = 0) -> Superoperator:
    """Dispatch on ``config.ensemble_id`` for map ensembles."""
    samplers = {
        EnsembleId.CPTP_GINIBRE: sample_cptp,
        EnsembleId.DECOMPOSABLE: sample_decomposable,
        EnsembleId.UNITARY: sample_unitary,
        EnsembleId.CP_GINIBRE: sample_cp,
    }
    if config.ensemble_id not in samplers:
        raise ValueError(f"{config.ensemble_id} is not a map ensemble")
    return samplers[config.ensemble_id](config, index)
