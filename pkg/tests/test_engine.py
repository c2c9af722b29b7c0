from dataclasses import replace

import numpy as np
import pytest

from swellfront.engine import MATERIALS, RunConfig, run, sweep
from swellfront.errors import ParameterError
from swellfront.params import PhysicalParams

SHORT = dict(n_output=41)


def _cfg(**physical):
    return RunConfig(physical=PhysicalParams(**physical), **SHORT)


def test_reference_run_shape(dense_run):
    r = dense_run
    assert r.reason == "completed"
    assert r.t[0] == 0.0 and r.t[-1] == 40.0
    assert r.s[0] == pytest.approx(0.01, rel=1e-15)
    assert np.all(np.diff(r.s) >= 0)
    assert r.s.max() <= r.config.physical.ell
    assert r.front_curve.shape == (401, 2)
    assert r.Bi == pytest.approx(15409.836, rel=1e-6)
    assert r.A0 == pytest.approx(1.3661202e6, rel=1e-6)
    assert [p.t for p in r.profiles] == [0.0, 10.0, 20.0, 40.0]
    for p in r.profiles:
        assert p.x[0] == 0.0 and p.x[-1] == pytest.approx(np.interp(p.t, r.t, r.s))


def test_profiles_decrease_towards_the_front(dense_run, foam_run):
    for res in (dense_run, foam_run):
        m = res.profiles[-1].m
        assert np.all(np.diff(m) <= 1e-12)


def test_stronger_swelling_piles_up_diffusant_at_the_front():
    weak = run(_cfg(sigma_coeff=20.0))
    strong = run(_cfg(sigma_coeff=5.0))
    assert strong.profiles[-1].m[-1] > weak.profiles[-1].m[-1]


def test_determinism():
    a = run(_cfg())
    b = run(_cfg())
    np.testing.assert_array_equal(a.s, b.s)
    np.testing.assert_array_equal(a.trajectory.alpha, b.trajectory.alpha)


def test_swelling_ordering():
    s = {c: run(_cfg(sigma_coeff=c)).s[-1] for c in (20.0, 10.0, 5.0)}
    assert s[20.0] > s[10.0] > s[5.0]


def test_front_speed_increases_with_a0():
    s = [run(_cfg(a0=a0)).s[-1] for a0 in (10.0, 100.0, 1000.0)]
    assert s[0] < s[1] < s[2]


def test_mesh_refinement(dense_run):
    fine = run(replace(dense_run.config, N=200))
    assert abs(fine.s[-1] - dense_run.s[-1]) / fine.s[-1] < 5e-3


def test_custom_output_times():
    r = run(RunConfig(output_times=(0.0, 3.5, 10.0, 30.0), profile_times=(30.0,)))
    np.testing.assert_array_equal(r.t, [0.0, 3.5, 10.0, 30.0])
    assert len(r.profiles) == 1 and r.profiles[0].t == 30.0


@pytest.mark.parametrize(
    "kw",
    [dict(N=1), dict(n_output=1), dict(output_times=(0.0, 50.0)), dict(output_times=(5.0, 1.0)),
     dict(profile_times=(-1.0,))],
)
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        RunConfig(**kw)


def test_material_presets():
    assert RunConfig().with_material("foam").physical.a0 == MATERIALS["foam"]["a0"]
    with pytest.raises(ParameterError):
        RunConfig().with_material("steel")


def test_sweep_ordering_and_failure_isolation():
    base = RunConfig(n_output=21, physical=PhysicalParams(T=5.0),
                     integrator=replace(RunConfig().integrator, max_steps=2_000_000))
    grid = [(500.0, 10.0), (1e300, 10.0), (100.0, 20.0)]
    pts = sweep(grid, base)
    assert [(p.a0, p.sigma_coeff) for p in pts] == grid
    assert pts[0].ok and pts[2].ok and not pts[1].ok
    assert "a0=1e+300" in pts[1].error


def test_single_point_sweep_equals_run():
    base = RunConfig(n_output=21, physical=PhysicalParams(T=5.0))
    (pt,) = sweep([(500.0, 10.0)], base)
    direct = run(base)
    np.testing.assert_array_equal(pt.result.s, direct.s)


def test_threaded_sweep_matches_serial():
    base = RunConfig(n_output=21, physical=PhysicalParams(T=5.0))
    grid = [(100.0, 10.0), (500.0, 5.0)]
    serial = sweep(grid, base)
    threaded = sweep(grid, base, workers=2)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.result.s, b.result.s)


def test_empty_sweep_rejected():
    with pytest.raises(ParameterError):
        sweep([], RunConfig())
