import json
from importlib import resources

import numpy as np
import pytest

from symplab.cocycle import constant, orthosymplectic
from symplab.errors import NotSimpleReal, StageFailure
from symplab.experiments import (
    AtomicMeasure,
    break_zero_experiment,
    dominated_periodic_scan,
    obstruction_experiment,
)
from symplab.lyapunov import periodic_spectrum
from symplab.shift import periodic_point


def demo_config(name="demo_l1.json", **over):
    cfg = json.loads(resources.files("symplab").joinpath("configs", name).read_text())
    small = {"segment_length": 100_000, "n_orbit": 100_000, "n_orbits": 2, "oracle_max_period": 6}
    cfg.update(small)
    cfg.update(over)
    return cfg


def test_atomic_measure_validation():
    m = AtomicMeasure.uniform(np.eye(2))
    assert m.weights.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        AtomicMeasure([np.array([1.0, 0.0]), np.array([-1.0, 0.0])], [0.5, 0.5])
    with pytest.raises(ValueError):
        AtomicMeasure([np.array([1.0, 0.0])], [0.7])
    pushed = m.push(np.diag([2.0, 0.5]))
    assert pushed.mismatch(m) == 0.0


def test_obstruction_constant_is_zero():
    A = constant(np.diag([2.0, 3.0, 0.5, 1 / 3]))
    rep = obstruction_experiment(A, periodic_point("0"), periodic_point("1"))
    assert rep.obstruction == 0.0
    # relabelling eigenvectors permutes the matching matrix only
    assert rep.obstruction == rep.matching[::-1, ::-1].min()


def test_obstruction_needs_simple_real():
    with pytest.raises(NotSimpleReal):
        obstruction_experiment(orthosymplectic(0, ell=1, depth=1), periodic_point("0"), periodic_point("1"))


def test_break_zero_small_run_consistent():
    rep = break_zero_experiment(demo_config())
    assert rep.hu_equal and rep.obstruction > 0.01
    assert rep.flags["zero_start"] and rep.flags["oracle_positive"]
    assert rep.recompute_flags() == rep.flags
    d = rep.to_json()
    json.dumps(d)
    assert set(rep.stages) >= {"generator", "zero_check", "breaking", "breaking_check", "spectrum_B", "periodic_oracle"}


def test_break_zero_shipped_demo_passes():
    rep = break_zero_experiment(demo_config(segment_length=1_000_000, n_orbit=1_000_000, n_orbits=4))
    assert rep.passed, rep.flags


def test_break_zero_eta_zero_matches_start():
    rep = break_zero_experiment(demo_config(eta=0.0))
    assert not rep.flags["qr_positive"]
    assert max(abs(x - rep.lambda1_A) for x in rep.lambda1_B) <= rep.noise_floor
    assert rep.obstruction == rep.obstruction_A


def test_rotation_start_zero_within_floor():
    rep = break_zero_experiment(demo_config("demo_l2.json"))
    assert abs(rep.lambda1_A) <= rep.noise_floor
    assert rep.transversal["case"] == "hyperbolic_ii"


def test_stage_failure_labels():
    with pytest.raises(StageFailure) as exc:
        break_zero_experiment(demo_config(cyl_depth=0))
    assert exc.value.stage == "breaking"


def test_seed_determinism():
    a = break_zero_experiment(demo_config(), seed=5)
    b = break_zero_experiment(demo_config(), seed=5)
    assert a.lambda1_B == b.lambda1_B and a.noise_floor == b.noise_floor


def test_scan_rotation_all_pass():
    A = orthosymplectic(0, ell=2, depth=1)
    rows = dominated_periodic_scan(A, 5, theta=1e-6)
    assert len(rows) == len(dominated_periodic_scan(A, 5, theta=1e-6, only_dominated=False))


def test_scan_hyperbolic_constant_empty():
    assert dominated_periodic_scan(constant(np.diag([2.0, 0.5])), 6, N=1, theta=0.1) == []


def test_scan_spectra_match_oracle():
    from symplab.cocycle import random_generator

    A = random_generator(1, ell=2, depth=1, scale=0.3)
    for row in dominated_periodic_scan(A, 6, theta=2.0):
        assert row.exponents == list(periodic_spectrum(A, periodic_point(row.word)).exponents)


def test_scan_period_limit():
    with pytest.raises(ValueError):
        dominated_periodic_scan(constant(np.eye(2)), 13)
