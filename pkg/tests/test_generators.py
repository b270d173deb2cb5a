import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmaps import generators as gen
from posmaps.positivity import is_cp
from posmaps.spectral import multiset_close, spectrum
from posmaps.superop import apply, from_action, is_trace_preserving

SIGMA_Z = np.diag([1.0, -1.0])


def lindblad_action(h, jumps, rates):
    def act(x):
        out = -1j * (h @ x - x @ h)
        for v, g in zip(jumps, rates):
            vv = v.conj().T @ v
            out = out + g * (v @ x @ v.conj().T - 0.5 * (vv @ x + x @ vv))
        return out
    return act


def test_transfer_matches_action(rng):
    d = 3
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (z + z.conj().T) / 2
    jumps = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(2)]
    rates = [0.3, 1.2]
    g = gen.gksl_generator(h, jumps, rates)
    np.testing.assert_allclose(g.transfer, from_action(lindblad_action(h, jumps, rates), d).transfer, atol=1e-12)
    assert g.trace_annihilation_defect() <= 1e-12


def test_dephasing_spectrum():
    g = gen.dephasing_generator(0.7)
    assert multiset_close(spectrum(g.transfer).eigenvalues, [0, 0, -1.4, -1.4], 1e-12)


def test_amplitude_damping_spectrum():
    g = gen.amplitude_damping_generator(0.4)
    assert multiset_close(spectrum(g.transfer).eigenvalues, [0, -0.4, -0.2, -0.2], 1e-12)


def test_amplitude_damping_relaxes_to_ground():
    g = gen.amplitude_damping_generator(0.4)
    rho = np.array([[0.2, 0.3], [0.3, 0.8]])
    out = apply(gen.semigroup(g, 50 / 0.4), rho)
    np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-9)


def test_semigroup_law(rng):
    g = gen.random_gksl(3, seed=1)
    a = gen.semigroup(g, 0.3)
    b = gen.semigroup(g, 0.5)
    np.testing.assert_allclose((a @ b).transfer, gen.semigroup(g, 0.8).transfer, atol=1e-12)
    np.testing.assert_allclose(gen.semigroup(g, 0).transfer, np.eye(9), atol=1e-15)
    with pytest.raises(ValueError):
        gen.semigroup(g, -1)


def test_semigroup_is_channel():
    g = gen.random_gksl(2, seed=2)
    for t in (0.01, 0.5, 3.0):
        phi = gen.semigroup(g, t)
        assert is_trace_preserving(phi) and is_cp(phi).is_cp


def test_validation():
    with pytest.raises(ValueError):
        gen.gksl_generator(np.array([[0, 1], [0, 0.0]]))
    with pytest.raises(ValueError):
        gen.gksl_generator(np.zeros((2, 2)), [SIGMA_Z], [-1.0])
    with pytest.raises(ValueError):
        gen.gksl_generator(np.zeros((2, 2)), [SIGMA_Z], [1.0, 2.0])


@given(st.integers(2, 4), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_random_generator_bounds(d, index):
    g = gen.random_gksl(d, seed=3, index=index)
    assert g.trace_annihilation_defect() <= 1e-10
    assert gen.check_generator_bound(g).satisfied
    rel = gen.relaxation_rates(g)
    assert rel.satisfied and rel.as_bound().satisfied
    ev = spectrum(g.transfer).eigenvalues
    assert np.min(np.abs(ev)) <= 1e-8
    assert ev.real.max() <= 1e-9


def test_generator_bound_saturated_by_dephasing():
    rep = gen.check_generator_bound(gen.dephasing_generator(1.0))
    # tr L = -4, d min Re = -4
    assert rep.lhs == pytest.approx(-4) and rep.rhs == pytest.approx(-4)


def test_limit_formula_taylor_oracle():
    # n (tr e^{L/n} - d^2) - tr L = tr(L^2) / (2n) + tr(L^3) / (6n^2) + O(1/n^3)
    for d in (2, 3):
        for i in range(10):
            g = gen.random_gksl(d, seed=4, index=i)
            l2 = g.transfer @ g.transfer
            tr_l2, tr_l3 = np.trace(l2).real, np.trace(l2 @ g.transfer).real
            for row in gen.limit_formula_check(g, [1000, 10_000]):
                expected = abs(tr_l2 / 2 + tr_l3 / (6 * row.n)) / row.n
                scale = np.linalg.norm(g.transfer) ** 4 / row.n ** 3
                assert abs(row.trace_residual - expected) <= scale + 1e-10


def test_limit_formula_converges():
    g = gen.random_gksl(3, seed=5)
    rows = gen.limit_formula_check(g, [100, 1000, 10_000])
    assert rows[-1].trace_residual < rows[0].trace_residual
    assert rows[-1].min_re_residual < rows[0].min_re_residual
    with pytest.raises(ValueError):
        gen.limit_formula_check(g, [0])


def test_spec_round_trip():
    g = gen.random_gksl(2, seed=6, n_jumps=2)
    back = gen.GeneratorSpec.from_dict(g.to_dict())
    np.testing.assert_allclose(back.transfer, g.transfer, atol=1e-15)
    assert len(back.jumps) == 2
