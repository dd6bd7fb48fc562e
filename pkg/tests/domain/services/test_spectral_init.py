# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest

from domain.calculations.metrics import node_disagreement, subspace_distance
from domain.entities.models import InitConfig
from domain.numerics.gaussian import truncated_gauss_second_moment
from domain.numerics.linalg import thin_qr
from domain.numerics.rng import RngStream, gaussian_matrix
from domain.services.network import build_network, network_from_edges, single_node_network, t_con_for
from domain.services.problem import generate_ground_truth, generate_measurements, partition_columns
from domain.services.spectral_init import (
    InitError,
    consensus_alpha,
    dec_power_method,
    init_check,
    init_x0_block,
    local_alpha,
    spectral_init,
    truncate_measurements,
    truncated_energy_ratio,
)

RING5 = frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)})


def test_local_alpha_zero_and_additive(np_rng):
    assert local_alpha(np.zeros((3, 4)), 2.0, 1.5, 4, 10) == 0.0
    y = np_rng.standard_normal((10, 6))
    full = local_alpha(y, 1.3, 2.0, 6, 10)
    parts = local_alpha(y[:4], 1.3, 2.0, 6, 10) + local_alpha(y[4:], 1.3, 2.0, 6, 10)
    assert parts == pytest.approx(full, rel=1e-12)
    assert full == pytest.approx(9 * 1.3 ** 2 * 4.0 * np.sum(y ** 2) / 60.0)
    with pytest.raises(InitError):
        local_alpha(np.zeros((0, 3)), 1.0, 1.0, 3, 1)


def test_local_alpha_custom_constant():
    y = np.ones((2, 2))
    assert local_alpha(y, 5.0, 5.0, 2, 2, trunc_constant=1.0) == pytest.approx(1.0)


def test_consensus_alpha():
    net = network_from_edges(RING5, 5)
    out = consensus_alpha([0.7] * 5, net, 20)
    assert out == pytest.approx([3.5] * 5)
    assert consensus_alpha([2.5], single_node_network(), 9) == [2.5]


def test_consensus_alpha_relative_error():
    net = build_network(8, 0.5, RngStream(3))
    local = list(np.linspace(0.5, 2.0, 8))
    out = consensus_alpha(local, net, t_con_for(0.01, net.gamma, 8))
    total = sum(local)
    assert max(abs(a - total) for a in out) <= 0.01 * total


def test_truncate_measurements():
    y = np.array([1.0, -3.0, 2.0])
    assert truncate_measurements(y, 4.0).tolist() == [1.0, 0.0, 2.0]
    assert truncate_measurements(y, 0.0).tolist() == [0.0, 0.0, 0.0]
    assert truncate_measurements(y, 9.0).tolist() == y.tolist()
    with pytest.raises(InitError):
        truncate_measurements(y, -1.0)


def test_init_x0_block_columns(np_rng):
    a = np_rng.standard_normal((3, 5, 4))
    y = np_rng.standard_normal((3, 5))
    block = init_x0_block(a, y)
    assert block.shape == (4, 3)
    for k in range(3):
        assert np.allclose(block[:, k], a[k].T @ y[k] / 5.0)
    assert np.all(init_x0_block(a, np.zeros((3, 5))) == 0.0)
    assert init_x0_block(np.ones((1, 1, 1)), np.array([[3.0]]))[0, 0] == 3.0


def test_x0_is_unbiased_without_truncation():
    x = np.array([1.0, -2.0, 0.5])
    cols = []
    for k in range(500):
        a = gaussian_matrix(20, 3, RngStream(k, 55))
        cols.append(init_x0_block(a[None], (a @ x)[None])[:, 0])
    mean = np.mean(cols, axis=0)
    assert np.linalg.norm(mean - x) <= 0.05 * np.linalg.norm(x)


def _blocks(gt, m, L, seed):
    meas = generate_measurements(gt, m, 1, RngStream(seed), sample_split=False)
    batch = meas.batch("0")
    part = partition_columns(gt.q, L)
    return [init_x0_block(batch.a[list(s)], batch.y[list(s)]) for s in part.sets]


def test_power_method_zero_iterations_returns_shared_start():
    gt = generate_ground_truth(20, 15, 2, RngStream(1))
    blocks = _blocks(gt, 10, 5, 2)
    res = dec_power_method(blocks, network_from_edges(RING5, 5), InitConfig(t_pm=0), RngStream(9), 2)
    assert node_disagreement(res.u0) == 0.0
    assert np.array_equal(res.u0[0], thin_qr(gaussian_matrix(20, 2, RngStream(9)))[0])


def test_single_node_power_method_matches_centralized_oracle():
    gt = generate_ground_truth(25, 20, 2, RngStream(4))
    (x0,) = _blocks(gt, 25, 1, 5)
    stream = RngStream(6)
    res = dec_power_method([x0], single_node_network(), InitConfig(t_pm=50, t_con=3), stream, 2)
    u = thin_qr(gaussian_matrix(25, 2, stream))[0]
    for _ in range(50):
        u = thin_qr(x0 @ (x0.T @ u))[0]
    assert subspace_distance(u, res.u0[0]) <= 1e-8


def test_two_loop_nodes_agree_with_fine_consensus():
    gt = generate_ground_truth(20, 20, 2, RngStream(11))
    blocks = _blocks(gt, 15, 5, 12)
    net = network_from_edges(RING5, 5)
    cfg = InitConfig(variant="two-loop", t_pm=10, t_con=t_con_for(1e-6, net.gamma, 5))
    res = dec_power_method(blocks, net, cfg, RngStream(13), 2)
    assert node_disagreement(res.u0) <= 1e-5
    assert np.allclose(res.u0[0].T @ res.u0[0], np.eye(2), atol=1e-10)


def test_two_loop_agreement_holds_at_every_iteration():
    gt = generate_ground_truth(20, 20, 2, RngStream(11))
    blocks = _blocks(gt, 15, 5, 12)
    net = network_from_edges(RING5, 5)
    t_con = t_con_for(1e-6, net.gamma, 5)
    for k in range(1, 13):
        res = dec_power_method(blocks, net, InitConfig(t_pm=k, t_con=t_con), RngStream(13), 2)
        assert node_disagreement(res.u0) <= 1e-5


def test_local_factors_come_from_each_node_alone():
    gt = generate_ground_truth(20, 20, 2, RngStream(11))
    blocks = _blocks(gt, 15, 5, 12)
    res = dec_power_method(blocks, network_from_edges(RING5, 5), InitConfig(t_pm=8, t_con=4), RngStream(13), 2)
    assert len(res.r_local) == 5
    for g, x in enumerate(blocks):
        u = thin_qr(gaussian_matrix(20, 2, RngStream(13)))[0]
        for _ in range(8):
            u, r = thin_qr(x @ (x.T @ u))
        assert np.allclose(res.r_local[g], r, rtol=1e-10, atol=1e-12)


def test_single_node_local_factors_are_the_shared_ones():
    gt = generate_ground_truth(20, 20, 2, RngStream(11))
    (x0,) = _blocks(gt, 15, 1, 12)
    res = dec_power_method([x0], single_node_network(), InitConfig(t_pm=6, t_con=2), RngStream(13), 2)
    assert np.array_equal(res.r_local[0], res.r_last[0])


def test_one_loop_bases_are_orthonormal():
    gt = generate_ground_truth(20, 20, 2, RngStream(11))
    blocks = _blocks(gt, 15, 5, 12)
    cfg = InitConfig(variant="one-loop", t_pm=10, t_con=5)
    res = dec_power_method(blocks, network_from_edges(RING5, 5), cfg, RngStream(13), 2)
    for u in res.u0:
        assert np.allclose(u.T @ u, np.eye(2), atol=1e-10)


def test_spectral_init_improves_on_random_start():
    gt = generate_ground_truth(60, 200, 2, RngStream(21))
    meas = generate_measurements(gt, 60, 1, RngStream(22), sample_split=False)
    part = partition_columns(200, 4)
    net = build_network(4, 0.8, RngStream(23))
    cfg = InitConfig(t_pm=30, t_con=50)
    res = spectral_init(meas, part, net, cfg, RngStream(24), 2, gt.kappa, gt.mu, gt=gt)
    start = thin_qr(gaussian_matrix(60, 2, RngStream(24)))[0]
    assert subspace_distance(gt.u_star, res.u0[0]) < subspace_distance(gt.u_star, start)
    assert subspace_distance(gt.u_star, res.u0[0]) < 0.5
    assert len(res.alpha) == 4 and all(a > 0 for a in res.alpha)


def test_truncated_energy_ratio_keeps_most_energy():
    gt = generate_ground_truth(100, 100, 2, RngStream(31))
    meas = generate_measurements(gt, 50, 1, RngStream(32), sample_split=False)
    y = meas.batch("00").y
    alpha = local_alpha(y, gt.kappa, gt.mu, 50, 100)
    assert float(np.mean(truncated_energy_ratio(y, alpha))) >= 0.85


def test_truncated_energy_ratio_matches_gaussian_moment():
    z = RngStream(41).standard_normals(50_000)
    for c in (1.0, 2.0):
        ratio = truncated_energy_ratio(z[None], c * c)[0] * float(np.mean(z * z))
        assert ratio == pytest.approx(truncated_gauss_second_moment(c), abs=0.02)


def test_init_check_bounds(np_rng):
    u = thin_qr(np_rng.standard_normal((10, 2)))[0]
    assert init_check(u, u) == pytest.approx(1.0)
    assert 0.0 <= init_check(u, thin_qr(np_rng.standard_normal((10, 2)))[0]) <= 1.0 + 1e-12
