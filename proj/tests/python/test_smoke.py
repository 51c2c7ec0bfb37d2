"""Smoke tests for the python extension module."""

import json
import math

import pytest

import entropy_net as en


def test_flux_catalog():
    burgers = en.make_flux("burgers1d")
    assert burgers.f(2.0) == pytest.approx(2.0)
    assert burgers.f_prime(2.0) == pytest.approx(2.0)
    assert burgers.spacetime(2.0) == pytest.approx([2.0, 2.0])
    assert en.make_flux("sine_flux").f(0.5) == pytest.approx(1.0)
    assert "buckley_leverett" in en.flux_catalog_names()
    with pytest.raises(ValueError):
        en.make_flux("nope")


def test_grid_integration():
    grid = en.QuadGrid([-1.0], [1.0], 0.5, [8], 4)
    assert grid.h == pytest.approx(math.sqrt((2 / 8) ** 2 + (0.5 / 4) ** 2))
    ones = [1.0] * grid.node_count
    assert grid.integrate(ones) == pytest.approx(1.0)


def test_exact_solutions():
    rare = en.make_problem("rarefaction")
    assert en.exact_solution(rare, [0.1, 0.4]) == pytest.approx(0.25)
    moving = en.make_problem("moving_shock")
    assert en.exact_solution(moving, [0.2, 0.3]) == 2.0


def test_network_roundtrip(tmp_path):
    net = en.init_network([2, 8, 8, 1], 4.0, 7)
    value = net.forward([0.3, 0.2])
    assert abs(value) <= 2.0
    path = str(tmp_path / "ckpt.json")
    en.save_network(net, path)
    back = en.load_network(path)
    assert back.forward([0.3, 0.2]) == value
    v, grad, active = net.forward_with_grad([0.3, 0.2])
    assert v == value
    assert len(grad) == 2


def test_weno():
    assert en.weno5_reconstruct([0, 1, 2, 3, 4]) == pytest.approx(2.5)
    snaps = en.solve_reference("moving_shock", cells=256, times=[0.5])
    t, xs, us = snaps[-1]
    assert t == pytest.approx(0.5)
    # the front has moved to ~0.5
    mid = [x for x, u in zip(xs, us) if u > 1.0]
    assert max(mid) == pytest.approx(0.5, abs=0.02)


def test_smoothing_kernels():
    assert en.psi_tau(20.0, 1.0) == pytest.approx(1.0, abs=1e-8)
    assert en.smooth_min(1.0, -1.0, 7.0) == pytest.approx(-math.tanh(14.0))
    rows = en.hat_compile_trace([0.0, 0.5, 1.0], 1, 1e-3)
    sups = [r[1] for r in rows]
    assert sups[-1] <= 1e-3
    assert all(b <= a for a, b in zip(sups, sups[1:]))


def test_training_smoke():
    config = {
        "benchmark": "standing_shock",
        "mesh": {"n_cells_x": [16], "n_cells_t": 8},
        "net": {"widths": [2, 8, 8, 1], "init_seed": 5},
        "pert": {"n_pert": 8, "seed": 5},
        "train": {"n_train": 30},
        "metrics": {"refine": 2},
    }
    out = en.train_from_json(json.dumps(config))
    assert out["strips"][0]["iterations"] == 30
    assert out["e_r_final"] >= 0.0
    assert out["reference_kind"] == "exact"
