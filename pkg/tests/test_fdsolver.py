import math

import numpy as np
import pytest

from burgers_pod.discretization import ConvectionScheme, NoTimestepError, make_grid
from burgers_pod.fdsolver import (
    BlowUpError,
    SimConfig,
    SnapshotMatrix,
    _Stepper,
    euler_step,
    initial_field,
    simulate,
    source_field,
    spatial_operator,
    timestep,
)


def loop_rhs(u, nu, q, dx):
    # scalar reference: second-order sign-switched upwind convection, central diffusion
    m = len(u)
    out = []
    for j in range(m):
        um2, um1, up1, up2 = u[(j - 2) % m], u[(j - 1) % m], u[(j + 1) % m], u[(j + 2) % m]
        if u[j] >= 0:
            ux = (3 * u[j] - 4 * um1 + um2) / (2 * dx)
        else:
            ux = (-3 * u[j] + 4 * up1 - up2) / (2 * dx)
        uxx = (up1 - 2 * u[j] + um1) / dx**2
        out.append(-u[j] * ux + nu * uxx + q[j])
    return np.array(out)


def test_initial_and_source_fields():
    g = make_grid(8)
    np.testing.assert_allclose(initial_field(g, 0.01), 0.01 * np.sin(g.x))
    np.testing.assert_allclose(source_field(g, 0.1), 0.1 * np.sin(g.x))
    assert initial_field(g, 0.01)[0] == 0.0


def test_euler_zero_state_zero_source():
    g = make_grid(16)
    u = euler_step(np.zeros(16), 0.1, 0.01, np.zeros(16), g, "upwind2")
    np.testing.assert_array_equal(u, 0.0)


def test_euler_constant_state_pure_diffusion_is_fixed():
    g = make_grid(16)
    u0 = np.full(16, 0.25)
    u = euler_step(u0, 0.1, 0.5, np.zeros(16), g, ConvectionScheme.NONE)
    np.testing.assert_array_equal(u, u0)


def test_euler_source_only_adds_dt_q():
    g = make_grid(16)
    q = source_field(g, 0.1)
    u = euler_step(np.zeros(16), 0.05, 0.0, q, g, "upwind1")
    np.testing.assert_allclose(u, 0.05 * q, rtol=0, atol=1e-18)


def test_euler_rejects_bad_dt():
    g = make_grid(8)
    with pytest.raises(ValueError):
        euler_step(np.zeros(8), 0.0, 0.01, np.zeros(8), g, "upwind2")


def test_euler_blowup_raises():
    g = make_grid(8)
    u = np.full(8, 1e300)
    u[0] = -1e300
    with pytest.raises(BlowUpError) as info, np.errstate(all="ignore"):
        euler_step(u, 1e10, 1.0, np.zeros(8), g, "upwind2", step=7)
    assert info.value.step == 7


@pytest.mark.parametrize("m", [4, 8, 32])
def test_spatial_operator_matches_scalar_loop(m, rng):
    g = make_grid(m)
    u = rng.standard_normal(m)
    q = rng.standard_normal(m)
    got = spatial_operator(u, 0.01, q, g, "upwind2")
    want = loop_rhs(list(u), 0.01, list(q), g.dx)
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-14 * max(1.0, np.max(np.abs(want))))


@pytest.mark.parametrize("scheme", list(ConvectionScheme))
def test_stepper_matches_spatial_operator(scheme, rng):
    g = make_grid(32)
    q = source_field(g, 0.1)
    st = _Stepper(g, 0.01, q, scheme)
    for _ in range(10):
        u = rng.standard_normal(32)
        np.testing.assert_array_equal(st.rhs(u), spatial_operator(u, 0.01, q, g, scheme))


def test_simulate_matches_repeated_euler_steps():
    cfg = SimConfig(t_final=0.2)
    res = simulate(cfg)
    g = make_grid(cfg.m)
    q = source_field(g, cfg.q0_amp)
    u = initial_field(g, cfg.u0_amp)
    for k in range(res.steps):
        u = euler_step(u, res.dt, cfg.nu, q, g, cfg.scheme, step=k + 1)
    np.testing.assert_array_equal(res.snapshots.data[:, -1], u)


def test_case1_step_count(case1_sim):
    # dt = 0.2 / (1/dx + 2 nu/dx^2) clamped onto t_final = 0.5
    assert case1_sim.steps == 13
    assert case1_sim.dt == pytest.approx(0.5 / 13, rel=1e-15)
    assert case1_sim.snapshots.shape == (32, 14)
    assert case1_sim.snapshots.times[-1] == 0.5
    assert case1_sim.snapshots.times[0] == 0.0


def test_simulate_deterministic():
    cfg = SimConfig(t_final=1.0)
    a, b = simulate(cfg), simulate(cfg)
    np.testing.assert_array_equal(a.snapshots.data, b.snapshots.data)


def test_zero_data_is_fixed_point():
    res = simulate(SimConfig(u0_amp=0.0, q0_amp=0.0, t_final=1.0))
    np.testing.assert_array_equal(res.snapshots.data, 0.0)


def test_t_final_equal_to_dt_gives_two_snapshots():
    cfg = SimConfig()
    dt, _ = timestep(cfg)
    res = simulate(SimConfig(t_final=dt))
    assert res.steps == 1
    assert res.snapshots.shape[1] == 2


def test_stride_keeps_first_and_last(case1_sim):
    res = simulate(SimConfig(snapshot_stride=5))
    np.testing.assert_array_equal(res.snapshots.times, [0.0, 5 * 0.5 / 13, 10 * 0.5 / 13, 0.5])
    np.testing.assert_array_equal(res.snapshots.data[:, -1], case1_sim.snapshots.data[:, -1])


def test_no_timestep_without_bounds():
    with pytest.raises(NoTimestepError):
        simulate(SimConfig(u_ref=0.0, nu=0.0))


@pytest.mark.parametrize(
    "kwargs",
    [dict(t_final=0.0), dict(cfl=-1.0), dict(nu=-0.1), dict(snapshot_stride=0), dict(u_ref=-1.0)],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_config_parses_scheme_string():
    assert SimConfig(scheme="upwind1").scheme is ConvectionScheme.UPWIND1


def test_snapshot_matrix_validation():
    g = make_grid(4)
    with pytest.raises(ValueError):
        SnapshotMatrix(np.zeros((5, 2)), [0.0, 1.0], g)
    with pytest.raises(ValueError):
        SnapshotMatrix(np.zeros((4, 2)), [0.0], g)
    with pytest.raises(ValueError):
        SnapshotMatrix(np.zeros((4, 2)), [1.0, 1.0], g)


def test_heat_mode_keeps_odd_symmetry(case5_sim):
    u = case5_sim.snapshots.data
    # sin-shaped data on the periodic grid: u(2pi - x) = -u(x)
    np.testing.assert_allclose(u[1:], -u[:0:-1], rtol=0, atol=1e-13 * np.max(np.abs(u)))


def test_heat_mode_energy_decays_without_source():
    res = simulate(SimConfig(t_final=5.0, nu=0.1, q0_amp=0.0, scheme="none"))
    energy = np.sum(res.snapshots.data**2, axis=0)
    assert np.all(np.diff(energy) <= 0)
    # single Fourier mode: exact discrete decay factor per step
    g = make_grid(32)
    lam = 1.0 - 0.1 * res.dt * 4.0 * math.sin(g.dx / 2) ** 2 / g.dx**2
    assert energy[-1] / energy[0] == pytest.approx(lam ** (2 * res.steps), rel=1e-10)


def test_full_order_blowup_raises():
    with pytest.raises(BlowUpError) as info:
        simulate(SimConfig(cfl=5.0, nu=1.0, t_final=50.0))
    assert info.value.step is not None
