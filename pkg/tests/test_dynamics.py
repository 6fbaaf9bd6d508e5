import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from cgi_sim import (ArmSpec, AtomSpecies, ExperimentParams, IdealPotential, KickEvent, LaserConfig,
                     PolynomialPotential, PropagationError, ProfileSpec, build_geometry,
                     ideal_trajectory, moment_integral, propagate_arm, propagate_arms,
                     synthesize_profile)
from cgi_sim.constants import AMU, HBAR
from cgi_sim.dynamics import energy, simpson_weights

M = 87 * AMU
V_REC = HBAR * 4e6 / M


def arms_of(kind, params, laser=LaserConfig()):
    geo = build_geometry(kind, laser, params)
    return [geo.arm_up, geo.arm_low]


def test_free_rest():
    z, v = ideal_trajectory(np.linspace(0, 1, 5), 0, 4e6, 1.0, 0.0, 0.0, 0.0)
    assert np.all(z == 1.0) and np.all(v == 0.0)


def test_apex_of_launch_parabola():
    z, v = ideal_trajectory(0.6, 0, 4e6, 0.0, 5.886, 9.81, 0.0)
    assert z == pytest.approx(5.886**2 / (2 * 9.81), rel=1e-12)
    assert z == pytest.approx(1.7658, abs=5e-5)
    assert v == pytest.approx(0.0, abs=1e-12)


def test_single_recoil_drift():
    z, _ = ideal_trajectory(0.6, 1, 4e6, 0.0, 0.0, 0.0, 0.0)
    assert z == pytest.approx(1.75194e-3, rel=5e-5)


def _piecewise_ideal(arm, t, g, gamma0):
    """Closed-form arm restarted from its state after every kick."""
    z = np.empty_like(t)
    z_s, v_s, t_s = arm.z0, arm.v0, 0.0
    for kk in arm.kicks:
        if kk.time > t_s:
            mask = (t >= t_s) & (t <= kk.time)
            zz, vv = ideal_trajectory(t[mask] - t_s, 0, 4e6, z_s, v_s, g, gamma0)
            z[mask] = zz
            z_s, v_s, t_s = zz[-1], vv[-1], kk.time
        v_s += kk.delta_p_quanta * V_REC
    mask = t > t_s
    if mask.any():
        z[mask] = ideal_trajectory(t[mask] - t_s, 0, 4e6, z_s, v_s, g, gamma0)[0]
    return z


@pytest.mark.parametrize("kind", ["MZI", "SDDI"])
def test_integrator_matches_closed_form(kind):
    params = ExperimentParams(z0=0.0, v0=0.0, T_R=0.6)
    model = IdealPotential(9.81, -2.7e-6)
    for arm, tr in zip(arms_of(kind, params), propagate_arms(model, arms_of(kind, params), params)):
        ref = _piecewise_ideal(arm, tr.t, 9.81, -2.7e-6)
        assert np.max(np.abs(tr.z - ref)) < 1e-12


def test_balanced_kicks_restore_velocity():
    params = ExperimentParams(z0=1.0, v0=0.3, T_R=0.5)
    arm = ArmSpec(1.0, 0.3, (KickEvent(0.0, 1), KickEvent(0.5, -2), KickEvent(1.0, 1)))
    tr = propagate_arm(PolynomialPotential((0.0,)), arm, params)
    assert tr.v[-1] == pytest.approx(0.3, abs=1e-15)
    assert tr.v[0] == pytest.approx(0.3 + V_REC, rel=1e-14)


def test_velocity_jump_includes_k_scale():
    params = ExperimentParams(z0=0.0, v0=0.0, T_R=0.5)
    arm = ArmSpec(0.0, 0.0, (KickEvent(0.5, 2, 1e-3),))
    tr = propagate_arm(PolynomialPotential((0.0,)), arm, params)
    i = tr.kick_index[0]
    assert tr.v[i] - tr.v_left(i) == pytest.approx(2 * 1.001 * V_REC, rel=1e-12)


def test_step_halving_on_bump_field():
    model = synthesize_profile(ProfileSpec(bumps=((4.0, 1.0, 1e-7),)))
    arm = arms_of("MZI", ExperimentParams(z0=2.0, v0=5.0, T_R=0.5))[0]
    ends = [propagate_arm(model, arm, ExperimentParams(2.0, 5.0, 0.5, n)).z[-1] for n in (20000, 40000)]
    assert abs(ends[0] - ends[1]) < 1e-12


def test_kick_times_land_on_nodes():
    tr = propagate_arms(IdealPotential(), arms_of("SDDI", ExperimentParams()), ExperimentParams())[0]
    assert tr.t[tr.kick_index[1]] == pytest.approx(0.6, abs=1e-15)
    arm = ArmSpec(5.0, 6.0, (KickEvent(0.123456789, 1),))
    with pytest.raises(ValueError, match="node"):
        propagate_arm(IdealPotential(), arm, ExperimentParams())


def test_kick_times_must_increase():
    with pytest.raises(ValueError):
        ArmSpec(0.0, 0.0, (KickEvent(0.5, 1), KickEvent(0.5, -1)))


def test_roi_exit_reports_time_and_height():
    model = synthesize_profile(ProfileSpec(bumps=()))
    arm = ArmSpec(7.5, 6.0, ())
    with pytest.raises(PropagationError) as info:
        propagate_arm(model, arm, ExperimentParams(7.5, 6.0, 0.6, 2000))
    assert info.value.height > 8.0 and 0.0 < info.value.time < 1.2


def test_mzi_area_uniform_gravity():
    params = ExperimentParams(z0=5.0, v0=6.0, T_R=0.6)
    up, low = propagate_arms(IdealPotential(9.81, 0.0), arms_of("MZI", params), params)
    assert moment_integral(up, low, 1) == pytest.approx(2 * V_REC * 0.36, rel=1e-10)
    assert moment_integral(up, low, 1) == pytest.approx(2.1023e-3, rel=5e-5)


def test_mzi_second_moment_free_space():
    params = ExperimentParams(z0=0.0, v0=0.0, T_R=0.6)
    up, low = propagate_arms(IdealPotential(0.0, 0.0), arms_of("MZI", params), params)
    assert moment_integral(up, low, 2) == pytest.approx((2 * V_REC) ** 2 * 0.6**3, rel=1e-10)
    assert moment_integral(up, low, 2) == pytest.approx(7.366e-6, rel=5e-4)


def test_sddi_second_moment_free_space_vanishes():
    params = ExperimentParams(z0=0.0, v0=0.0, T_R=0.6)
    up, low = propagate_arms(IdealPotential(0.0, 0.0), arms_of("SDDI", params), params)
    assert abs(moment_integral(up, low, 2)) < 1e-20


def _symbolic_mzi_a2():
    t, T, w, g = sp.symbols("t T w g", positive=True)
    # arm heights for z0 = v0 = 0 in uniform gravity, w = 2 N hbar k / m
    up1 = w * t - g * t**2 / 2
    up2 = w * T - g * t**2 / 2
    low1 = -g * t**2 / 2
    low2 = w * (t - T) - g * t**2 / 2
    a2 = sp.integrate(up1**2 - low1**2, (t, 0, T)) + sp.integrate(up2**2 - low2**2, (t, T, 2 * T))
    return sp.simplify(a2), (T, w, g)


def test_mzi_second_moment_matches_symbolic_oracle():
    expr, (T, w, g) = _symbolic_mzi_a2()
    assert sp.simplify(expr - (w**2 * T**3 - sp.Rational(7, 6) * w * g * T**4)) == 0
    params = ExperimentParams(z0=0.0, v0=0.0, T_R=0.6)
    up, low = propagate_arms(IdealPotential(9.81, 0.0), arms_of("MZI", params), params)
    want = float(expr.subs({T: 0.6, w: 2 * V_REC, g: 9.81}))
    assert moment_integral(up, low, 2) == pytest.approx(want, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(-5, 5), st.floats(-8, 8), st.floats(0.0, 12.0), st.floats(0.05, 0.8))
def test_first_moments_agree_without_curvature(z0, v0, g, T):
    params = ExperimentParams(z0, v0, T, n_steps=400)
    model = IdealPotential(g, 0.0)
    mu, ml = propagate_arms(model, arms_of("MZI", params), params)
    su, sl = propagate_arms(model, arms_of("SDDI", params), params)
    assert abs(moment_integral(mu, ml, 1) - moment_integral(su, sl, 1)) < 1e-12


def test_moment_requires_shared_grid():
    pa, pb = ExperimentParams(n_steps=200), ExperimentParams(T_R=0.5, n_steps=200)
    a = propagate_arms(IdealPotential(), arms_of("MZI", pa), pa)
    b = propagate_arms(IdealPotential(), arms_of("MZI", pb), pb)
    with pytest.raises(ValueError, match="grid"):
        moment_integral(a[0], b[1], 2)


@pytest.mark.parametrize("name", ["ideal", "synth"])
def test_energy_conserved_between_kicks(name, synth):
    model = IdealPotential(9.81, -2.7e-6) if name == "ideal" else synth
    params = ExperimentParams(z0=1.0, v0=6.0, T_R=0.6)
    tr = propagate_arm(model, ArmSpec(1.0, 6.0, ()), params)
    e = energy(model, tr)
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 9])
def test_simpson_weights_integrate_cubics_exactly(n):
    x = np.arange(n + 1, dtype=float)
    w = simpson_weights(n)
    exact = n**4 / 4 if n > 1 else 0.25
    vals = x**3
    assert w.sum() == pytest.approx(n, rel=1e-15)
    if n > 1:
        assert (w * vals).sum() == pytest.approx(exact, rel=1e-14)
