import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmaps import spectral as sp
from posmaps.errors import DimensionError, NotTracePreservingError, NumericalFailure
from posmaps.positivity import EnsembleConfig, sample_cptp, sample_unitary
from posmaps.superop import Superoperator, identity_map, transpose_map, depolarizing_map
from posmaps.zoo import pinch_flip_map


def test_spectrum_sorted_and_summary():
    rep = sp.spectrum(np.diag([3.0, -1.0, 1j, -1j]))
    np.testing.assert_array_equal(rep.eigenvalues, [-1, -1j, 1j, 3])
    assert rep.min_re == -1 and rep.max_re == 3 and rep.spectral_radius == 3
    assert rep.trace == 2
    assert rep.conjugation_closed()


def test_spectrum_rejects_bad_input():
    with pytest.raises(DimensionError):
        sp.spectrum(np.zeros((2, 3)))
    with pytest.raises(NumericalFailure):
        sp.spectrum(np.array([[np.nan, 0], [0, 1]]))


def test_multiset_distance():
    assert sp.multiset_distance([1, 2, 3], [3, 1, 2]) == 0
    assert sp.multiset_distance([1, 1], [1]) == np.inf
    assert sp.multiset_distance([0, 1], [1.1, 0]) == pytest.approx(0.1)
    assert sp.multiset_close([1j, -1j], [-1j, 1j + 1e-10], 1e-9)


def test_transpose_spectrum():
    for d in (2, 3, 4):
        rep = sp.spectrum(transpose_map(d))
        expected = [-1] * (d * (d - 1) // 2) + [1] * (d * (d + 1) // 2)
        np.testing.assert_allclose(rep.eigenvalues.real, expected, atol=1e-12)


def test_map_bound_transpose_and_identity():
    r2 = sp.check_map_bound(transpose_map(2))
    assert (r2.lhs, r2.rhs, r2.slack, r2.satisfied) == pytest.approx((2, 0, -2, False))
    r3 = sp.check_map_bound(transpose_map(3))
    assert r3.lhs == pytest.approx(3) and r3.rhs == pytest.approx(3)
    assert abs(r3.slack) <= 1e-9 and r3.satisfied
    ident = sp.check_map_bound(identity_map(3))
    assert ident.lhs == pytest.approx(9) and ident.rhs == pytest.approx(9)


def test_map_bound_depolarizing():
    for d in (2, 3, 4):
        rep = sp.check_map_bound(depolarizing_map(d))
        assert rep.lhs == pytest.approx(1)
        assert rep.rhs == pytest.approx(d * d - d)


def test_map_bound_requires_tp():
    with pytest.raises(NotTracePreservingError):
        sp.check_map_bound(pinch_flip_map())


def test_trivial_bound():
    rep = sp.check_trivial_bound(transpose_map(2))
    assert rep.satisfied and rep.rhs == pytest.approx(2)


def test_optimality_requires_c_above_d():
    with pytest.raises(ValueError):
        sp.check_optimality(identity_map(2), 2.0)
    rep = sp.check_optimality(transpose_map(2), 2.5)
    assert rep.strict and rep.inequality_id is sp.InequalityId.OPTIMALITY


def test_strict_report_semantics():
    above = sp.BoundReport.strictly_above(1.0, 0.5, sp.InequalityId.OPTIMALITY, 1e-9)
    assert above.slack == 0.5 and above.satisfied
    tie = sp.BoundReport.strictly_above(1.0, 1.0, sp.InequalityId.OPTIMALITY, 1e-9)
    assert not tie.satisfied
    up = sp.BoundReport.upper(1.0, 1.0 - 1e-10, sp.InequalityId.MAP_BOUND, 1e-9)
    assert up.satisfied
    assert up.to_dict()["inequality_id"] == "MAP_BOUND"


@given(st.integers(2, 4), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_cptp_spectrum_properties(d, index):
    phi = sample_cptp(EnsembleConfig(dim=d, seed=3), index)
    rep = sp.spectrum(phi)
    assert rep.spectral_radius <= 1 + 1e-9
    assert any(abs(z - 1) <= 1e-8 for z in rep.eigenvalues)
    assert rep.conjugation_closed(1e-8)
    assert sp.check_map_bound(phi).satisfied
    assert sp.check_conjecture(phi).satisfied


@given(st.integers(2, 4), st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_unitary_channels_satisfy_bound(d, index):
    phi = sample_unitary(EnsembleConfig(dim=d, seed=4, ensemble_id="UNITARY"), index)
    assert np.allclose(np.abs(sp.spectrum(phi).eigenvalues), 1, atol=1e-9)
    assert sp.check_map_bound(phi).satisfied


def test_conjecture_scale_invariance():
    phi = pinch_flip_map()
    r1 = sp.check_conjecture(phi)
    r2 = sp.check_conjecture(Superoperator(2.5 * phi.transfer))
    assert r2.slack == pytest.approx(2.5 * r1.slack)
