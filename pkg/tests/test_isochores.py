"""Bath-contact propagators versus direct ODE integration."""

import numpy as np
import pytest

import spinfridge as sf
from spinfridge.isochores import isochore_oracle

M2 = sf.MediumParams(2.0)


def _random_state(fp, rng, T=None):
    st = sf.thermal_state(fp, T if T is not None else rng.uniform(0.1, 2.0))
    eps = rng.uniform(-0.02, 0.02, 2) * fp.Omega
    return sf.ObservableState(st.E, eps[0], eps[1], st.D, fp)


def test_matches_ode_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        J = rng.uniform(0.5, 4.0)
        m = sf.MediumParams(J, gamma_b=rng.choice([0.0, 0.01]))
        spec = sf.IsochoreSpec(rng.uniform(0.0, 3.0), rng.uniform(0.1, 6.0),
                               sf.Bath(rng.uniform(0.1, 2.0), rng.uniform(0.2, 3.0)))
        fp = sf.effective_gap(spec.omega, m)
        st = _random_state(fp, rng)
        got = sf.isochore_propagator(spec, m).apply(st)
        ref = isochore_oracle(spec, m, st)
        for a, b in ((got.E, ref.E), (got.L, ref.L), (got.C, ref.C),
                     (got.D, ref.D)):
            assert a == pytest.approx(b, abs=1e-10)


def test_zero_duration_is_identity():
    spec = sf.IsochoreSpec(1.0, 0.0, sf.Bath(0.5, 1.0))
    prop = sf.isochore_propagator(spec, M2)
    assert np.abs(prop.M - np.eye(5)).max() == 0.0


def test_long_contact_thermalizes():
    bath = sf.Bath(0.4, 1.5)
    spec = sf.IsochoreSpec(0.8, 60.0, bath)
    fp = sf.effective_gap(0.8, M2)
    rng = np.random.default_rng(1)
    out = sf.isochore_propagator(spec, M2).apply(_random_state(fp, rng))
    th = sf.thermal_state(fp, bath.T)
    assert out.E == pytest.approx(th.E, abs=1e-12)
    assert abs(out.L) < 1e-12 and abs(out.C) < 1e-12
    assert out.D == pytest.approx(th.D, abs=1e-12)


def test_thermal_state_is_fixed_point():
    bath = sf.Bath(0.7, 0.9)
    spec = sf.IsochoreSpec(1.3, 2.2, bath)
    fp = sf.effective_gap(1.3, M2)
    th = sf.thermal_state(fp, bath.T)
    out = sf.isochore_propagator(spec, M2).apply(th)
    assert out.E == pytest.approx(th.E, abs=1e-14)
    assert out.D == pytest.approx(th.D, abs=1e-14)
    assert out.L == 0.0 and out.C == 0.0


def test_semigroup_property():
    bath = sf.Bath(0.5, 1.1)
    m = sf.MediumParams(2.0, gamma_b=0.02)
    full = sf.isochore_propagator(sf.IsochoreSpec(0.6, 3.0, bath), m)
    half = sf.isochore_propagator(sf.IsochoreSpec(0.6, 1.5, bath), m)
    assert np.abs(half.after(half).M - full.M).max() < 1e-13


def test_partial_propagator():
    bath = sf.Bath(0.5, 1.1)
    spec = sf.IsochoreSpec(0.6, 3.0, bath)
    part = sf.isochore_propagator(spec, M2, t=1.2)
    ref = sf.isochore_propagator(sf.IsochoreSpec(0.6, 1.2, bath), M2)
    assert np.abs(part.M - ref.M).max() == 0.0
    with pytest.raises(ValueError):
        sf.isochore_propagator(spec, M2, t=3.5)


def test_energy_half_life():
    bath = sf.Bath(0.5, 2.0)
    fp = sf.effective_gap(1.0, M2)
    e_eq = sf.equilibrium_energy(fp, bath.T)
    tau_half = np.log(2.0) / bath.Gamma
    st = sf.thermal_state(fp, 5.0)
    out = sf.isochore_propagator(sf.IsochoreSpec(1.0, tau_half, bath), M2).apply(st)
    assert (out.E - e_eq) == pytest.approx(0.5 * (st.E - e_eq), rel=1e-12)


def test_coherence_rotation_and_damping():
    # small time step: dL = -Omega C dt, dC = +Omega L dt minus damping
    bath = sf.Bath(0.5, 1.0)
    m = sf.MediumParams(2.0, gamma_b=0.05)
    fp = sf.effective_gap(1.5, m)
    dt = 1e-6
    st = sf.ObservableState(0.0, 0.1, -0.04, 0.0, fp)
    out = sf.isochore_propagator(sf.IsochoreSpec(1.5, dt, bath), m).apply(st)
    gd = bath.Gamma + m.gamma_b * fp.Omega**2
    assert (out.L - st.L) / dt == pytest.approx(
        -fp.Omega * st.C - gd * st.L, rel=1e-4)
    assert (out.C - st.C) / dt == pytest.approx(
        fp.Omega * st.L - gd * st.C, rel=1e-4)


def test_weak_coupling_limit_rotates_coherences():
    # Gamma -> 0: E and D frozen, (L, C) rotated by Omega tau
    bath = sf.Bath(0.5, 1e-13)
    fp = sf.effective_gap(1.0, M2)
    tau = 2.7
    st = sf.ObservableState(-0.8, 0.1, -0.05, 0.3, fp)
    out = sf.isochore_propagator(sf.IsochoreSpec(1.0, tau, bath), M2).apply(st)
    c, s = np.cos(fp.Omega * tau), np.sin(fp.Omega * tau)
    assert out.E == pytest.approx(st.E, abs=1e-10)
    assert out.D == pytest.approx(st.D, abs=1e-10)
    assert out.L == pytest.approx(c * st.L - s * st.C, abs=1e-10)
    assert out.C == pytest.approx(s * st.L + c * st.C, abs=1e-10)


def test_positivity_preserved():
    rng = np.random.default_rng(9)
    for _ in range(60):
        m = sf.MediumParams(rng.uniform(0.5, 4.0))
        spec = sf.IsochoreSpec(rng.uniform(0.0, 3.0), rng.uniform(0.0, 10.0),
                               sf.Bath(rng.uniform(0.05, 2.0), rng.uniform(0.2, 3.0)))
        fp = sf.effective_gap(spec.omega, m)
        st = _random_state(fp, rng)
        out = sf.isochore_propagator(spec, m).apply(st)
        rho = sf.reconstruct_rho(out)
        assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_contraction_toward_equilibrium():
    bath = sf.Bath(0.5, 1.0)
    spec_t = lambda t: sf.IsochoreSpec(1.0, t, bath)
    fp = sf.effective_gap(1.0, M2)
    e_eq = sf.equilibrium_energy(fp, bath.T)
    st = sf.ObservableState(-1.8, 0.2, 0.1, 1.2, fp)
    prev_e, prev_r = np.inf, np.inf
    for t in (0.5, 1.0, 2.0, 4.0):
        out = sf.isochore_propagator(spec_t(t), M2).apply(st)
        e_dist = abs(out.E - e_eq)
        r = np.hypot(out.L, out.C)
        assert e_dist < prev_e and r < prev_r
        prev_e, prev_r = e_dist, r


def test_spec_validation():
    with pytest.raises(ValueError):
        sf.IsochoreSpec(1.0, -0.1, sf.Bath(0.5, 1.0))
    with pytest.raises(ValueError):
        sf.IsochoreSpec(-1.0, 0.1, sf.Bath(0.5, 1.0))
