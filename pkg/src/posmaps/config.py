"""Numerical tolerances shared by every module.

All checks read their slack from a single frozen record so that callers can
tighten or relax them in one place. The defaults are the values the test
suite is written against.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # relative to max-abs entry, with an absolute floor
    hermiticity_rel: float = 1e-12
    hermiticity_floor: float = 1e-14
    imag_trace: float = 1e-9
    trace_preserving: float = 1e-9
    # min Choi eigenvalue accepted as PSD
    cp: float = 1e-9
    # omega must have min eigenvalue above this to be treated as full rank
    positive_definite: float = 1e-12
    # non-strict inequalities: satisfied when slack >= -bound
    bound: float = 1e-9
    # strict inequalities: satisfied when margin > strict
    strict: float = 1e-9
    eigenvalue_match: float = 1e-8
    fixed_point_radius: float = 1e-8
    witness_certify: float = 1e-8
    real_entries: float = 1e-10

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT_TOL = Tolerances()
