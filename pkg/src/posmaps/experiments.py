"""Seeded scans and example verification driving the CLI."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .generators import check_generator_bound, random_gksl, relaxation_rates
from .positivity import (
    EnsembleConfig,
    EnsembleId,
    PositivityVerdict,
    falsify_k_positivity,
    is_cp,
    make_rng,
    sample,
)
from .serialize import read_choi
from .spectral import (
    InequalityId,
    check_conjecture,
    check_map_bound,
    check_optimality,
    check_trivial_bound,
    multiset_distance,
    spectrum,
)
from .superop import (
    choi,
    from_choi,
    is_hermiticity_preserving,
    is_trace_preserving,
    trace_superop,
    transpose_map,
)
from .transition import (
    OrthonormalBasis,
    check_lemma_tg,
    random_basis,
    transition_matrix,
)
from . import zoo

WORKERS_ENV = "POSMAPS_WORKERS"
BASIS_KEY = 1 << 20

CSV_FIELDS = ("sample_id", "d", "inequality_id", "lhs", "rhs", "slack", "satisfied", "seed")


class UsageError(ValueError):
    """Invalid combination of command-line parameters."""


# --- scans --------------------------------------------------------------------

MAP_INEQUALITIES = {InequalityId.MAP_BOUND, InequalityId.TRIVIAL_BOUND,
                    InequalityId.LEMMA_TG, InequalityId.CONJECTURE}
ALLOWED = {
    EnsembleId.CPTP_GINIBRE: MAP_INEQUALITIES,
    EnsembleId.DECOMPOSABLE: MAP_INEQUALITIES,
    EnsembleId.UNITARY: MAP_INEQUALITIES,
    EnsembleId.CP_GINIBRE: {InequalityId.CONJECTURE, InequalityId.LEMMA_TG},
    EnsembleId.GKSL: {InequalityId.GEN_BOUND, InequalityId.RELAX_RATE},
}
DEFAULTS = {
    EnsembleId.CPTP_GINIBRE: (InequalityId.MAP_BOUND, InequalityId.TRIVIAL_BOUND, InequalityId.LEMMA_TG),
    EnsembleId.DECOMPOSABLE: (InequalityId.MAP_BOUND, InequalityId.TRIVIAL_BOUND),
    EnsembleId.UNITARY: (InequalityId.MAP_BOUND, InequalityId.TRIVIAL_BOUND, InequalityId.LEMMA_TG),
    EnsembleId.CP_GINIBRE: (InequalityId.CONJECTURE,),
    EnsembleId.GKSL: (InequalityId.GEN_BOUND, InequalityId.RELAX_RATE),
}


@dataclass(frozen=True)
class ScanRow:
    sample_id: int
    d: int
    inequality_id: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    seed: int

    def csv_values(self) -> list[str]:
        return [str(self.sample_id), str(self.d), self.inequality_id, repr(self.lhs),
                repr(self.rhs), repr(self.slack), "true" if self.satisfied else "false", str(self.seed)]


@dataclass
class ScanResult:
    config: EnsembleConfig
    inequalities: tuple[InequalityId, ...]
    rows: list[ScanRow]
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in self.rows:
            writer.writerow(row.csv_values())
        return buf.getvalue()

    @property
    def count_violated(self) -> int:
        return sum(not r.satisfied for r in self.rows)


def summarize(rows: Sequence[ScanRow]) -> dict:
    """Per-inequality and overall minimum slack and violation counts."""
    per: dict[str, dict] = {}
    for r in rows:
        entry = per.setdefault(r.inequality_id, {"count": 0, "count_violated": 0, "min_slack": math.inf})
        entry["count"] += 1
        entry["count_violated"] += int(not r.satisfied)
        entry["min_slack"] = min(entry["min_slack"], r.slack)
    return {
        "count": len(rows),
        "count_violated": sum(e["count_violated"] for e in per.values()),
        "min_slack": min((e["min_slack"] for e in per.values()), default=None),
        "by_inequality": {k: per[k] for k in sorted(per)},
    }


def parse_inequalities(spec: str | Iterable[str] | None, ensemble: EnsembleId) -> tuple[InequalityId, ...]:
    if spec is None or spec == "":
        return DEFAULTS[ensemble]
    names = spec.split(",") if isinstance(spec, str) else list(spec)
    try:
        chosen = tuple(InequalityId(n.strip().upper()) for n in names if n.strip())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bad = [i.value for i in chosen if i not in ALLOWED[ensemble]]
    if bad:
        raise UsageError(f"inequalities {bad} do not apply to ensemble {ensemble.value}")
    return chosen


def _row(index: int, d: int, seed: int, report) -> ScanRow:
    return ScanRow(index, d, report.inequality_id.value, report.lhs, report.rhs,
                   report.slack, report.satisfied, seed)


def evaluate_sample(config: EnsembleConfig, index: int,
                    inequalities: Sequence[InequalityId], bases: int = 1) -> list[ScanRow]:
    """Draw sample ``index`` and evaluate the requested inequalities on it."""
    d, seed = config.dim, config.seed
    rows = []
    if config.ensemble_id is EnsembleId.GKSL:
        gen = random_gksl(d, seed, index, config.kraus_rank)
        for ineq in inequalities:
            if ineq is InequalityId.GEN_BOUND:
                rows.append(_row(index, d, seed, check_generator_bound(gen)))
            else:
                rows.append(_row(index, d, seed, relaxation_rates(gen).as_bound()))
        return rows
    phi = sample(config, index)
    for ineq in inequalities:
        if ineq is InequalityId.MAP_BOUND:
            rows.append(_row(index, d, seed, check_map_bound(phi)))
        elif ineq is InequalityId.TRIVIAL_BOUND:
            rows.append(_row(index, d, seed, check_trivial_bound(phi)))
        elif ineq is InequalityId.CONJECTURE:
            rows.append(_row(index, d, seed, check_conjecture(phi)))
        elif ineq is InequalityId.LEMMA_TG:
            rng = make_rng(seed, index, BASIS_KEY)
            for _ in range(bases):
                rows.append(_row(index, d, seed, check_lemma_tg(phi, random_basis(d, rng))))
    return rows


def _evaluate_chunk(args) -> list[ScanRow]:
    config, indices, inequalities, bases = args
    out = []
    for i in indices:
        out.extend(evaluate_sample(config, i, inequalities, bases))
    return out


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def run_scan(config: EnsembleConfig, inequalities: Sequence[InequalityId] | str | None = None,
             bases: int = 1, workers: int | None = None) -> ScanResult:
    """Evaluate ``config.count`` samples; rows come back ordered by sample id."""
    ineqs = inequalities if isinstance(inequalities, tuple) and all(
        isinstance(i, InequalityId) for i in inequalities) else parse_inequalities(inequalities, config.ensemble_id)
    for i in ineqs:
        if i not in ALLOWED[config.ensemble_id]:
            raise UsageError(f"{i.value} does not apply to ensemble {config.ensemble_id.value}")
    workers = default_workers() if workers is None else max(1, workers)
    start = time.perf_counter()
    indices = list(range(config.count))
    if workers == 1 or config.count < 2:
        rows = _evaluate_chunk((config, indices, ineqs, bases))
    else:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_evaluate_chunk, [(config, c, ineqs, bases) for c in chunks if c])
            rows = [r for part in parts for r in part]
    order = {ineq.value: n for n, ineq in enumerate(ineqs)}
    rows.sort(key=lambda r: (r.sample_id, order[r.inequality_id]))
    summary = summarize(rows)
    summary["wall_time_s"] = time.perf_counter() - start
    summary["config"] = config.to_dict()
    summary["inequalities"] = [i.value for i in ineqs]
    summary["bases_per_sample"] = bases
    return ScanResult(config, tuple(ineqs), rows, summary)


def write_scan(result: ScanResult, csv_path, json_path) -> None:
    for p in (csv_path, json_path):
        Path(p).parent.mkdir(parents=True, exist_ok=True)
    Path(csv_path).write_text(result.to_csv())
    Path(json_path).write_text(json.dumps(result.summary, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return None
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)}")


# --- example verification -----------------------------------------------------

DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 10) for i in range(11))


@dataclass
class Entry:
    location: str
    expected: object
    observed: object
    passed: bool

    def to_dict(self) -> dict:
        return {"location": self.location, "expected": self.expected,
                "observed": self.observed, "pass": bool(self.passed)}


def _matrix_json(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag)) > 0:
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(z) for z in row] for row in np.real(m)]


def verify_zoo(alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID, dims: Sequence[int] = (2, 3, 4, 5),
               seed: int = 2025, restarts: int = 50) -> dict[str, Entry]:
    """Recompute every closed-form claim about the example maps."""
    out: dict[str, Entry] = {}

    def add(key, location, expected, observed, passed):
        out[key] = Entry(location, expected, observed, bool(passed))

    # pinch-flip qubit map ---------------------------------------------------
    phi3 = zoo.pinch_flip_map()
    c3 = choi(phi3).entries
    add("Example_3_choi", "qubit map 4 X_00 |0><0| + sigma_x X^T sigma_x, Choi matrix", _matrix_json(zoo.PINCH_FLIP_CHOI), _matrix_json(c3),
        np.max(np.abs(c3 - zoo.PINCH_FLIP_CHOI)) <= 1e-12)
    tr3 = trace_superop(phi3)
    add("Example_3_trace", "qubit map, trace", 6.0, tr3, abs(tr3 - 6) <= 1e-10)
    rng = make_rng(seed, 3)
    dev, tr_dev = 0.0, 0.0
    for _ in range(100):
        p, x, w = rng.uniform(0, 2 * np.pi, 3)
        t = transition_matrix(phi3, OrthonormalBasis(zoo.su2(p, x, w))).entries
        dev = max(dev, float(np.max(np.abs(t - zoo.pinch_flip_transition_closed(p)))))
        tr_dev = max(tr_dev, abs(np.trace(t) - 4))
    add("Example_3_transition_matrix", "qubit map, T_U for 100 random (phi, xi, omega)",
        "[[4cos^2 phi, 1], [1, 4sin^2 phi]]", {"max_abs_deviation": dev}, dev <= 1e-10)
    add("Example_3_transition_trace", "qubit map, tr T_U = 4", 4.0, {"max_abs_deviation": tr_dev},
        tr_dev <= 1e-10)
    rep = check_lemma_tg(phi3, OrthonormalBasis(zoo.su2(0.3, 1.1, -0.4)))
    add("Example_3_lemma_bound", "qubit map, tr = 6 <= 8 = 2*4", [6.0, 8.0], [rep.lhs, rep.rhs],
        rep.satisfied and abs(rep.lhs - 6) <= 1e-10 and abs(rep.rhs - 8) <= 1e-10)
    f2 = falsify_k_positivity(phi3, 2, restarts=restarts, seed=seed)
    f1 = falsify_k_positivity(phi3, 1, restarts=restarts, seed=seed)
    add("Example_3_not_2_positive", "qubit map, positive but not 2-positive",
        {"k2_witness": True, "k1_witness": False},
        {"k2_min": f2.min_value, "k1_min": f1.min_value},
        f2.falsified and not f1.falsified)

    # sigma_x o transpose ------------------------------------------------------
    sx = zoo.sigma_x_transpose_map()
    t_sx = transition_matrix(sx, OrthonormalBasis.standard(2)).entries
    rep = check_lemma_tg(sx, OrthonormalBasis.standard(2))
    add("Remark_Lemma_sigma_x_transpose", "sigma_x o transpose, tr = 2 > 0 = 2 tr(T)",
        {"lhs": 2.0, "rhs": 0.0, "T": [[0.0, 1.0], [1.0, 0.0]]},
        {"lhs": rep.lhs, "rhs": rep.rhs, "T": _matrix_json(t_sx)},
        (not rep.satisfied) and rep.lhs == 2.0 and rep.rhs == 0.0
        and np.array_equal(t_sx, zoo.SIGMA_X.real) and not is_cp(sx).is_cp)

    # transpose -----------------------------------------------------------------
    for d, ok_expected in ((2, False), (3, True)):
        tau = transpose_map(d)
        rep = check_map_bound(tau)
        exp_slack = -2.0 if d == 2 else 0.0
        add(f"Remark_1ii_transpose_d{d}", f"transpose map d={d}, trace bound",
            {"lhs": float(d), "rhs": float(d * (-1) + d * d - d), "satisfied": ok_expected},
            rep.to_dict(), rep.satisfied == ok_expected and abs(rep.slack - exp_slack) <= 1e-12)
    ev = spectrum(transpose_map(2)).eigenvalues
    add("Remark_1ii_transpose_spectrum_d2", "transpose map d=2, eigenvalues 1 (x3), -1 (x1)",
        [-1.0, 1.0, 1.0, 1.0], [float(z.real) for z in ev],
        multiset_distance(ev, [1, 1, 1, -1]) <= 1e-12)
    add("Remark_1ii_transpose_not_cp", "transpose map d=2, not 2-positive",
        -1.0, is_cp(transpose_map(2)).min_eigenvalue, abs(is_cp(transpose_map(2)).min_eigenvalue + 1) <= 1e-12)

    # Takasaki-Tomiyama family ---------------------------------------------------
    for d, expected in ((2, 0.5), (3, 0.0)):
        th = zoo.tt_threshold(d)
        add(f"Example_1_threshold_d{d}", f"TT family, alpha threshold d={d}", expected, th,
            abs(th - expected) <= 1e-15)
    spec_dev, trace_dev, flip_ok = 0.0, 0.0, True
    for d in dims:
        th = zoo.tt_threshold(d)
        for a in alpha_grid:
            params = zoo.TTParams(d, float(a))
            m = zoo.tt_map(params)
            spec_dev = max(spec_dev, multiset_distance(spectrum(m).eigenvalues,
                                                       zoo.tt_closed_spectrum(params).eigenvalues))
            trace_dev = max(trace_dev, abs(trace_superop(m) - zoo.tt_trace(params)))
            holds = check_map_bound(m).satisfied
            if holds != (a >= th - 1e-10):
                flip_ok = False
    add("Example_1_spectrum_grid", "TT family, closed-form spectrum on the alpha grid",
        {"max_abs_deviation_at_most": 1e-10}, {"max_abs_deviation": spec_dev}, spec_dev <= 1e-10)
    add("Example_1_trace_formula", "TT family, tr = (1-2a)d / (1+a(d-2)(d+1))",
        {"max_abs_deviation_at_most": 1e-10}, {"max_abs_deviation": trace_dev}, trace_dev <= 1e-10)
    add("Example_1_threshold_flip", "TT family, bound holds iff alpha >= threshold",
        True, flip_ok, flip_ok)
    tt = zoo.tt_map(zoo.TTParams(3, 1 / 3))
    cp = is_cp(tt)
    add("Example_1_cp_d3_alpha_third", "TT family, completely positive for alpha in [1/d, 1/2]",
        True, {"is_cp": cp.is_cp, "min_choi_eigenvalue": cp.min_eigenvalue}, cp.is_cp)
    tr_half = trace_superop(zoo.tt_map(zoo.TTParams(2, 0.5)))
    add("Example_1_trace_d2_alpha_half", "TT family, trace vanishes at alpha = 1/2", 0.0, tr_half,
        abs(tr_half) <= 1e-12)

    # tightness construction ---------------------------------------------------
    params, phi2 = zoo.tightness_map(2, 2.5)
    sp = spectrum(phi2)
    expected_ev = [1, 1, np.exp(2j * params.alpha), np.exp(-2j * params.alpha)]
    add("Example_2_spectrum_d2", "rotation map d=2, eigenvalues {1, 1, e^{2ia}, e^{-2ia}}",
        {"x": 0.5, "min_re": -0.5, "trace": 1.0},
        {"x": params.x, "min_re": sp.min_re, "trace": trace_superop(phi2)},
        params.x == 0.5 and multiset_distance(sp.eigenvalues, expected_ev) <= 1e-10
        and abs(sp.min_re + 0.5) <= 1e-10 and abs(trace_superop(phi2) - 1) <= 1e-10)
    params3, phi3b = zoo.tightness_map(3, 4.0)
    a = params3.alpha
    ev3 = spectrum(phi3b).eigenvalues
    needed = [np.exp(1j * a), np.exp(2j * a), np.exp(-1j * a), np.exp(-2j * a), 1.0]
    present = all(np.min(np.abs(ev3 - z)) <= 1e-10 for z in needed)
    add("Example_2_spectrum_d3", "rotation map d=3, spectrum contains {1, e^{+-ia}, e^{+-2ia}}",
        True, present, present)
    for d, c in ((2, 2.5), (3, 4.0), (4, 5.0)):
        p, m = zoo.tightness_map(d, c)
        opt = check_optimality(m, c)
        mb = check_map_bound(m)
        closed_ok = (abs(trace_superop(m) - p.trace) <= 1e-10 and abs(spectrum(m).min_re - p.min_re) <= 1e-10)
        add(f"Example_2_optimality_d{d}_c{c:g}", f"rotation map, strict violation for c > d, d={d}, c={c:g}",
            {"optimality_violated": True, "map_bound_holds": True},
            {"x": p.x, "margin": opt.slack, "map_bound_slack": mb.slack},
            opt.satisfied and opt.slack > 1e-6 and mb.satisfied and closed_ok and is_cp(m).is_cp)
    return out


def manifest(entries: dict[str, Entry]) -> dict:
    failing = sorted(k for k, e in entries.items() if not e.passed)
    return {
        "all_pass": not failing,
        "failing": failing,
        "entries": {k: e.to_dict() for k, e in entries.items()},
    }


# --- tightness and falsification ----------------------------------------------

def tightness_report(d: int, c: float) -> dict:
    if not c > d:
        raise UsageError(f"the coefficient must satisfy c > d (got c={c}, d={d})")
    params, phi = zoo.tightness_map(d, c)
    sp = spectrum(phi)
    return {
        "d": d,
        "c": c,
        "x": params.x,
        "alpha": params.alpha,
        "f_x": zoo.tightness_f(params.x, d, c),
        "trace": trace_superop(phi),
        "min_re": sp.min_re,
        "closed_form": {"trace": params.trace, "min_re": params.min_re},
        "map_bound": check_map_bound(phi).to_dict(),
        "optimality": check_optimality(phi, c).to_dict(),
    }


def falsify_choi(c, ks: Sequence[int] = (1, 2), restarts: int = 50, seed: int = 0) -> PositivityVerdict:
    phi = from_choi(c)
    cp = is_cp(phi)
    found = {k: falsify_k_positivity(phi, k, restarts, seed) for k in ks}

    def pick(k, attr):
        return getattr(found[k], attr) if k in found else None

    return PositivityVerdict(
        is_tp=is_trace_preserving(phi),
        is_hp=is_hermiticity_preserving(phi),
        is_cp=cp.is_cp,
        min_choi_eigenvalue=cp.min_eigenvalue,
        k1_witness=pick(1, "witness"),
        k2_witness=pick(2, "witness"),
        min_found_k1=pick(1, "min_value"),
        min_found_k2=pick(2, "min_value"),
        restarts=restarts,
        seed=seed,
    )


def falsify_file(path, ks: Sequence[int] = (1, 2), restarts: int = 50, seed: int = 0) -> PositivityVerdict:
    return falsify_choi(read_choi(path), ks, restarts, seed)

