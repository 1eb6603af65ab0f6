"""Undamped regime: lattice rest points, speed law, diffusion, density."""
import math

import numpy as np
import pytest

from thomaslab import (
    DomainError,
    InsufficientDataError,
    IntegratorConfig,
    LatticePoint,
    WalkStats,
    density_check,
    diffusion_estimate,
    integrate,
    lattice_eigenvalues,
    mean_speed,
    msd_curve,
    sin_sq_means,
    streamed_speed_stats,
    walk_stats,
)
from thomaslab.walk import MIN_DURATION, RMS_SPEED_PREDICTION

from oracles import lattice_jacobian, sorted_eigs

S0 = (2.0, 1.0, 0.5)


def walk_traj(t_end=20000.0, stride=10, s0=S0):
    cfg = IntegratorConfig(step_h=0.01, t_end=t_end, transient_skip=0.0)
    return integrate(s0, 0.0, cfg, rec_stride=stride)


@pytest.fixture(scope="module")
def traj():
    return walk_traj()


def test_lattice_point_basics():
    p = LatticePoint(1, -2, 4)
    assert np.array_equal(p.state, np.pi * np.array([1.0, -2.0, 4.0]))
    assert p.sign == -1
    assert LatticePoint(0, 0, 0).sign == 1
    with pytest.raises(DomainError):
        LatticePoint(1.5, 0, 0)  # type: ignore[arg-type]


def test_lattice_eigenvalues_match_generic_solver():
    combos = [(n, m, k) for n in (0, 1) for m in (0, 1) for k in (0, 1)]
    combos += [(7, -4, 12), (-3, -3, -3), (2, 5, -1)]
    for n, m, k in combos:
        ours = np.array(lattice_eigenvalues(LatticePoint(n, m, k)).as_complex())
        ref = sorted_eigs(lattice_jacobian(n, m, k))
        ours = ours[np.lexsort((ours.imag, ours.real))]
        assert np.max(np.abs(ours - ref)) < 1e-12


def test_lattice_eigenvalues_are_cube_roots_of_parity():
    for n, m, k in [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)]:
        p = LatticePoint(n, m, k)
        for lam in lattice_eigenvalues(p).as_complex():
            assert lam ** 3 == pytest.approx(p.sign, abs=1e-12)


def test_every_lattice_point_is_unstable():
    for n in (0, 1):
        for m in (0, 1):
            for k in (0, 1):
                t = lattice_eigenvalues(LatticePoint(n, m, k))
                assert t.max_real > 0.49


def test_mean_speed_near_rms_prediction(traj):
    v = mean_speed(traj)
    assert abs(v / RMS_SPEED_PREDICTION - 1.0) < 0.02
    assert RMS_SPEED_PREDICTION == pytest.approx(math.sqrt(1.5), abs=1e-15)


def test_mean_speed_zero_on_pinned_origin():
    cfg = IntegratorConfig(step_h=0.01, t_end=MIN_DURATION, transient_skip=0.0)
    traj0 = integrate((0.0, 0.0, 0.0), 0.0, cfg, rec_stride=100)
    assert mean_speed(traj0) == 0.0


def test_speed_never_exceeds_global_bound(traj):
    speeds = np.linalg.norm(np.sin(traj.states), axis=1)
    assert np.max(speeds) <= math.sqrt(3.0) + 1e-12


def test_short_runs_are_rejected():
    short = walk_traj(t_end=100.0, stride=1)
    with pytest.raises(InsufficientDataError):
        mean_speed(short)
    with pytest.raises(InsufficientDataError):
        sin_sq_means(short)
    with pytest.raises(InsufficientDataError):
        msd_curve(short, [1.0])


def test_sin_sq_means_equidistribute(traj):
    means = sin_sq_means(traj)
    assert means.shape == (3,)
    assert np.max(np.abs(means / 0.5 - 1.0)) < 0.02


def test_streamed_matches_trajectory_statistics(traj):
    v, means = streamed_speed_stats(S0, t_end=20000.0, step_h=0.01)
    # identical sampling grid; only the accumulation order differs
    assert v == pytest.approx(mean_speed(walk_traj(stride=1)), abs=1e-8)
    full = sin_sq_means(walk_traj(stride=1))
    assert means == pytest.approx(full, abs=1e-8)
    with pytest.raises(InsufficientDataError):
        streamed_speed_stats(S0, t_end=100.0)


def test_msd_ballistic_at_short_lags(traj):
    (lag, val), = msd_curve(traj, [0.5])
    # displacement within half a time unit is essentially speed * lag
    assert val <= 3.0 * 0.5 ** 2 * 1.01
    assert val >= 0.5 * 1.5 * 0.5 ** 2 * 0.5


def test_msd_grows_and_becomes_sublinear(traj):
    lags = np.geomspace(0.5, traj.duration / 4.0, 16)
    curve = msd_curve(traj, lags)
    vals = np.array([v for _, v in curve])
    assert np.all(vals > 0.0)
    # non-decreasing up to sampling noise
    assert np.all(np.diff(vals) > -0.05 * vals[:-1])
    # far below the ballistic envelope at the longest lag
    t_max, v_max = curve[-1]
    assert v_max / (3.0 * t_max ** 2) < 0.05


def test_msd_zero_lag_is_zero(traj):
    (lag, val), = msd_curve(traj, [0.0])
    assert lag == 0.0 and val == 0.0


def test_msd_validation(traj):
    with pytest.raises(DomainError):
        msd_curve(traj, [traj.duration / 3.0])
    with pytest.raises(DomainError):
        msd_curve(traj, [-1.0])
    cfg45 = IntegratorConfig(method="rk45", t_end=20000.0, transient_skip=0.0)
    nonuniform = integrate(S0, 0.0, cfg45)
    with pytest.raises(DomainError):
        msd_curve(nonuniform, [1.0])


def test_diffusion_estimate_positive(traj):
    lags = np.geomspace(1.0, traj.duration / 4.0, 20)
    d = diffusion_estimate(msd_curve(traj, lags))
    assert 0.05 < d < 5.0


def test_diffusion_slope_oracle():
    # a synthetic curve with exactly linear growth 6 D t recovers D
    curve = [(t, 6.0 * 0.25 * t) for t in np.geomspace(1.0, 1000.0, 12)]
    assert diffusion_estimate(curve) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(InsufficientDataError):
        diffusion_estimate(curve[:2])


def test_walk_stats_bundle(traj):
    stats = walk_stats(traj)
    assert isinstance(stats, WalkStats)
    assert stats.mean_speed == mean_speed(traj)
    assert len(stats.msd_curve) == 24
    assert stats.diffusion_estimate > 0.0
    lags = [l for l, _ in stats.msd_curve]
    assert lags == sorted(lags)
    assert lags[-1] <= traj.duration / 4.0 + 1e-9


def test_density_is_conserved_without_damping():
    for seed in (0, 7):
        rep = density_check(n_init=8192, t_end=50.0, cells_per_side=4,
                            rng_seed=seed)
        assert not rep.low_statistics
        assert rep.expected_per_cell == 8192 / 64
        assert rep.max_cell_drift <= rep.noise_floor
        assert rep.counts_initial.shape == (4, 4, 4)
        assert int(rep.counts_initial.sum()) == 8192
        assert int(rep.counts_final.sum()) == 8192


def test_density_collapses_with_damping():
    free = density_check(n_init=8192, t_end=50.0, cells_per_side=4, rng_seed=0)
    damped = density_check(n_init=8192, t_end=50.0, cells_per_side=4,
                           rng_seed=0, b=0.3)
    assert damped.max_cell_drift > 5.0 * damped.noise_floor
    assert damped.max_cell_drift > 10.0 * free.max_cell_drift


def test_density_low_statistics_flag():
    rep = density_check(n_init=512, t_end=5.0, cells_per_side=8, rng_seed=0)
    assert rep.low_statistics
    assert rep.expected_per_cell == 1.0


def test_density_noise_floor_formula():
    rep = density_check(n_init=512, t_end=5.0, cells_per_side=2, rng_seed=0)
    assert rep.noise_floor == pytest.approx(3.0 * math.sqrt(2.0 / 64.0),
                                            abs=1e-12)


def test_density_deterministic_in_seed():
    a = density_check(n_init=256, t_end=5.0, cells_per_side=2, rng_seed=3)
    b = density_check(n_init=256, t_end=5.0, cells_per_side=2, rng_seed=3)
    assert np.array_equal(a.counts_final, b.counts_final)


def test_density_validation():
    with pytest.raises(DomainError):
        density_check(n_init=0)
    with pytest.raises(DomainError):
        density_check(n_init=64, cells_per_side=0)
    with pytest.raises(DomainError):
        density_check(n_init=64, t_end=0.0)
    with pytest.raises(DomainError):
        density_check(n_init=64, b=-0.1)
