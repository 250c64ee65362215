import numpy as np
import pytest

import p2pkinetics as pk
from p2pkinetics.simulate import SimulationError

from oracles import euler_path


def explosive_scheme(rate=5.0):
    """Autocatalytic 2x -> 3x; the ODE blows up in finite time."""
    grow = pk.reaction_from_counts(
        ["x"], {"x": 2}, {"x": 3}, pk.RateLaw(rate, (("x", 2),)), "grow"
    )
    return pk.validated(pk.make_scheme(["x"], [grow]))


def test_run_config_validation():
    with pytest.raises(ValueError):
        pk.RunConfig(t_end=0.0)
    with pytest.raises(ValueError):
        pk.RunConfig(dt=-0.1)
    with pytest.raises(ValueError):
        pk.RunConfig(record_every=0)
    with pytest.raises(ValueError):
        pk.RunConfig(noise_scale=-1.0)
    with pytest.raises(ValueError):
        pk.RunConfig(seed=2**64)


def test_ode_constant_at_fixed_point(ft_focus):
    traj = pk.integrate_ode(ft_focus, [5.0, 2.0], pk.RunConfig(t_end=100.0, dt=0.01))
    assert traj.error is None
    assert np.max(np.abs(traj.states - np.array([5.0, 2.0]))) < 1e-10


def test_ode_converges_to_fixed_point(ft_focus):
    traj = pk.integrate_ode(ft_focus, [10.0, 1.0], pk.RunConfig(t_end=200.0, dt=0.01))
    assert traj.final_state == pytest.approx([5.0, 2.0], abs=1e-4)


def test_ode_conserves_closed_population(bt_closed):
    traj = pk.integrate_ode(bt_closed, [10.0, 1.0], pk.RunConfig(t_end=100.0, dt=0.01))
    assert len(traj.times) == 10001  # 1e4 steps, all recorded
    totals = traj.states.sum(axis=1)
    assert np.max(np.abs(totals - 11.0)) < 1e-9


def test_rk4_fourth_order_convergence(ft_focus):
    def endpoint(dt):
        cfg = pk.RunConfig(t_end=10.0, dt=dt)
        return pk.integrate_ode(ft_focus, [10.0, 1.0], cfg).states[-1]

    reference = endpoint(0.0005)
    coarse = np.linalg.norm(endpoint(0.2) - reference)
    fine = np.linalg.norm(endpoint(0.1) - reference)
    assert 12.0 < coarse / fine < 20.0


def test_recording_grid_and_stride(ft_focus):
    cfg = pk.RunConfig(t_end=1.0, dt=0.1, record_every=3)
    traj = pk.integrate_ode(ft_focus, [5.0, 2.0], cfg)
    # steps 0,3,6,9 on stride plus the final step 10
    assert traj.times == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])
    assert np.all(np.diff(traj.times) > 0)


def test_final_time_within_dt_of_t_end(ft_focus):
    traj = pk.integrate_ode(ft_focus, [5.0, 2.0], pk.RunConfig(t_end=0.95, dt=0.1))
    assert traj.times[-1] == pytest.approx(1.0)
    assert abs(traj.times[-1] - 0.95) <= 0.1


def test_ode_abort_on_blowup():
    traj = pk.integrate_ode(explosive_scheme(), [100.0], pk.RunConfig(t_end=10.0, dt=0.5))
    assert traj.error is not None
    assert "non-finite" in traj.error
    assert np.all(np.isfinite(traj.states))  # partial prefix is clean


def test_sde_zero_noise_equals_euler(ft_focus):
    cfg = pk.RunConfig(t_end=5.0, dt=0.01, seed=9, noise_scale=0.0)
    sde = pk.integrate_sde(ft_focus, [10.0, 1.0], cfg)
    reference = euler_path(lambda x: pk.drift(ft_focus, x), [10.0, 1.0], 0.01, cfg.n_steps)
    assert np.array_equal(sde.states, reference)


def test_sde_deterministic_per_seed(ft_focus):
    cfg = pk.RunConfig(t_end=5.0, dt=0.01, seed=1234)
    a = pk.integrate_sde(ft_focus, [5.0, 2.0], cfg)
    b = pk.integrate_sde(ft_focus, [5.0, 2.0], cfg)
    assert np.array_equal(a.states, b.states)
    other = pk.integrate_sde(ft_focus, [5.0, 2.0], pk.RunConfig(t_end=5.0, dt=0.01, seed=5))
    assert not np.array_equal(a.states, other.states)


def test_sde_conserves_closed_population(bt_closed):
    cfg = pk.RunConfig(t_end=100.0, dt=0.01, seed=3)
    traj = pk.integrate_sde(bt_closed, [10.0, 1.0], cfg)
    assert traj.error is None
    totals = traj.states.sum(axis=1)
    assert np.max(np.abs(totals - 11.0)) < 1e-9


def test_sde_rejects_negative_initial(ft_focus):
    with pytest.raises(ValueError, match="nonnegative"):
        pk.integrate_sde(ft_focus, [-1.0, 1.0], pk.RunConfig())


def test_ssa_single_firing(bt_closed):
    traj = pk.ssa_run(bt_closed, [1, 1], pk.RunConfig(t_end=1e6, seed=2))
    assert traj.states.tolist() == [[1, 1], [0, 2]]
    assert traj.times[0] == 0.0 and traj.times[1] > 0.0


def test_ssa_absorbing_start(bt_closed):
    traj = pk.ssa_run(bt_closed, [0, 7], pk.RunConfig(t_end=10.0, seed=2))
    assert traj.states.tolist() == [[0, 7]]
    assert traj.times.tolist() == [0.0]


def test_ssa_conservation_exact_and_nonnegative(bt_closed):
    traj = pk.ssa_run(bt_closed, [50, 3], pk.RunConfig(t_end=100.0, seed=11))
    assert traj.error is None
    assert (traj.states >= 0).all()
    assert (traj.states.sum(axis=1) == 53).all()
    assert traj.states[-1].tolist() == [0, 53]  # closed swarm fully converts


def test_ssa_stops_at_t_end(ft_focus):
    traj = pk.ssa_run(ft_focus, [10, 1], pk.RunConfig(t_end=7.0, seed=4))
    assert traj.times[-1] <= 7.0
    assert np.all(np.diff(traj.times) > 0)


def test_ssa_deterministic_per_seed(ft_focus):
    cfg = pk.RunConfig(t_end=10.0, seed=77)
    a = pk.ssa_run(ft_focus, [10, 1], cfg)
    b = pk.ssa_run(ft_focus, [10, 1], cfg)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)


def test_ssa_record_every_keeps_last_event(ft_focus):
    cfg = pk.RunConfig(t_end=10.0, seed=77)
    full = pk.ssa_run(ft_focus, [10, 1], cfg)
    strided = pk.ssa_run(ft_focus, [10, 1], pk.RunConfig(t_end=10.0, seed=77, record_every=5))
    assert strided.times[-1] == full.times[-1]
    assert np.array_equal(strided.states[-1], full.states[-1])
    assert set(strided.times).issubset(set(full.times))


def test_ssa_rejects_fractional_initial(ft_focus):
    with pytest.raises(ValueError, match="integer"):
        pk.ssa_run(ft_focus, [1.5, 2.0], pk.RunConfig())


def test_ssa_event_budget(ft_focus):
    traj = pk.ssa_run(ft_focus, [10, 1], pk.RunConfig(t_end=1e9, seed=1), max_events=100)
    assert traj.error is not None
    assert "budget" in traj.error


def test_euler_maruyama_weak_consistency_pure_influx(influx_only):
    # mean of x(t) over many paths must track lambda * t
    cfg = pk.RunConfig(t_end=1.0, dt=0.01, seed=2024)
    stats = pk.ensemble(influx_only, [0.0], cfg, runs=10_000, mode="sde")
    for k in (25, 50, 100):
        t = stats.times[k]
        se = np.sqrt(stats.variance[k, 0] / stats.run_count)
        assert abs(stats.mean[k, 0] - 1.0 * t) < 3.0 * se


def test_ensemble_equal_seeds_zero_variance(ft_focus):
    cfg = pk.RunConfig(t_end=2.0, dt=0.1, seed=0)
    stats = pk.ensemble(ft_focus, [5.0, 2.0], cfg, runs=2, mode="sde", seeds=[7, 7])
    assert np.all(stats.variance == 0.0)


def test_ensemble_zero_noise_zero_variance(ft_focus):
    cfg = pk.RunConfig(t_end=2.0, dt=0.1, seed=5, noise_scale=0.0)
    stats = pk.ensemble(ft_focus, [5.0, 2.0], cfg, runs=4, mode="sde")
    assert np.all(stats.variance == 0.0)
    assert stats.run_count == 4


def test_ensemble_ssa_grid_alignment(ft_focus):
    cfg = pk.RunConfig(t_end=5.0, dt=0.5, seed=8, record_every=2)
    stats = pk.ensemble(ft_focus, [10, 1], cfg, runs=16, mode="ssa")
    ode = pk.integrate_ode(ft_focus, [10.0, 1.0], cfg)
    assert stats.times == pytest.approx(ode.times)
    assert stats.mean.shape == (len(ode.times), 2)
    assert (stats.variance >= 0.0).all()


def test_ensemble_requires_two_runs(ft_focus):
    with pytest.raises(ValueError, match="runs"):
        pk.ensemble(ft_focus, [5.0, 2.0], pk.RunConfig(), runs=1, mode="sde")


def test_ensemble_rejects_bad_mode(ft_focus):
    with pytest.raises(ValueError, match="mode"):
        pk.ensemble(ft_focus, [5.0, 2.0], pk.RunConfig(), runs=2, mode="ode")


def test_ensemble_failed_run_aborts_with_run_index():
    cfg = pk.RunConfig(t_end=10.0, dt=0.5, seed=0)
    with pytest.raises(SimulationError, match="sde run 0"):
        pk.ensemble(explosive_scheme(), [100.0], cfg, runs=2, mode="sde")


def test_derive_run_seed_distinct_and_stable():
    seeds = {pk.derive_run_seed(0, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert all(0 <= s < 2**64 for s in seeds)
    assert pk.derive_run_seed(42, 7) == pk.derive_run_seed(42, 7)
    assert pk.derive_run_seed(42, 7) != pk.derive_run_seed(43, 7)
