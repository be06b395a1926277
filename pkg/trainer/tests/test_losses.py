import numpy as np
import pytest
import torch

import ispforge
from ispforge.pipeline import GenerationRecipe, produce_sample
from ispforge.geometry import build_geometry
from ispforge.operators import assemble_operators
from ispforge.forward import incident_fields, solve_forward

import quadnn
from quadnn.losses import field_consistency, mix_loss, ssim, tv

FIXTURE_TOLERANCE = 1e-5


@pytest.fixture(scope="module")
def physics(small_cfg):
    geom = build_geometry(small_cfg)
    ops = assemble_operators(geom, small_cfg)
    inc = incident_fields(geom, small_cfg)
    return geom, ops, inc


def _fixture_pair(small_cfg, ops, inc, seed):
    rng = np.random.default_rng(seed)
    truth = ispforge.gen_polygon(small_cfg, seed)
    fields, _ = solve_forward(truth, ops, inc)
    pred = np.clip(truth.values + rng.normal(0, 0.3, truth.values.shape), 0, 4)
    return pred, truth.values, fields


def test_losses_agree_with_reference_on_ten_fixtures(small_cfg, physics):
    _, ops, inc = physics
    g = torch.from_numpy(ops.g_domain)
    n_tx, grid = small_cfg.n_tx, small_cfg.grid_n
    for seed in range(10):
        pred, truth, fields = _fixture_pair(small_cfg, ops, inc, 300 + seed)
        ref_ssim = ispforge.ssim(pred, truth)
        ref_tv = ispforge.tv(pred)
        ref_field = ispforge.field_loss(pred, truth, fields, ops)

        tp = torch.from_numpy(pred[None])
        tt = torch.from_numpy(truth[None])
        etot = torch.from_numpy(fields.total.reshape(1, n_tx, grid, grid))
        assert abs(float(ssim(tp, tt)[0]) - ref_ssim) <= FIXTURE_TOLERANCE
        assert abs(float(tv(tp)[0]) - ref_tv) <= FIXTURE_TOLERANCE
        assert abs(float(field_consistency(tp, tt, etot, g)[0]) - ref_field) <= max(
            FIXTURE_TOLERANCE, FIXTURE_TOLERANCE * ref_field
        )


def test_mix_matches_reference_breakdown(small_cfg, physics):
    _, ops, inc = physics
    pred, truth, fields = _fixture_pair(small_cfg, ops, inc, 42)
    alpha = ispforge.alpha_balance(truth, fields, ops)
    ref = ispforge.loss_eval(pred, truth, fields, ops, beta=0.3)

    tp = torch.from_numpy(pred[None])
    tt = torch.from_numpy(truth[None])
    etot = torch.from_numpy(fields.total.reshape(1, small_cfg.n_tx, small_cfg.grid_n, small_cfg.grid_n))
    loss, parts = mix_loss(
        tp, tt, 0.3,
        alpha=torch.tensor([alpha]),
        etot=etot,
        g_domain=torch.from_numpy(ops.g_domain),
    )
    assert abs(float(loss) - ref.mix_total) <= FIXTURE_TOLERANCE * max(1.0, ref.mix_total)
    assert abs(parts["field"] - ref.field) <= FIXTURE_TOLERANCE
    assert abs(parts["tv"] - ref.tv) <= FIXTURE_TOLERANCE


def _toy_physics(grid=16, n_tx=4, seed=0):
    rng = np.random.default_rng(seed)
    n_cells = grid * grid
    truth = np.zeros((grid, grid))
    truth[5:10, 6:12] = 1.5
    etot = rng.standard_normal((n_tx, grid, grid)) + 1j * rng.standard_normal((n_tx, grid, grid))
    g = 0.1 * (rng.standard_normal((n_cells, n_cells)) + 1j * rng.standard_normal((n_cells, n_cells)))
    g = (g + g.T) / 2
    pred0 = np.clip(truth + rng.normal(0, 0.3, truth.shape), 0, 4)
    return truth, etot, g, pred0


def test_gradient_matches_finite_differences():
    # autodiff gradient of the composite loss against central differences
    # on a 16x16 toy scene, double precision
    truth_np, etot_np, g_np, pred0 = _toy_physics()
    truth = torch.from_numpy(truth_np).double()[None]
    etot = torch.from_numpy(etot_np)[None].to(torch.complex128)
    g = torch.from_numpy(g_np).to(torch.complex128)
    alpha = torch.tensor([0.7], dtype=torch.float64)

    def loss_of(p):
        loss, _ = mix_loss(p, truth, 0.2, alpha=alpha, etot=etot, g_domain=g)
        return loss

    pred = torch.from_numpy(pred0).double()[None].requires_grad_(True)
    loss = loss_of(pred)
    loss.backward()
    grad = pred.grad.clone()

    rng = np.random.default_rng(1)
    step = 1e-6
    for _ in range(5):
        i, j = rng.integers(0, 16, size=2)
        delta = torch.zeros_like(pred)
        delta[0, i, j] = step
        with torch.no_grad():
            hi = loss_of((pred + delta).detach())
            lo = loss_of((pred - delta).detach())
        fd = float(hi - lo) / (2 * step)
        ad = float(grad[0, i, j])
        assert ad == pytest.approx(fd, rel=1e-3, abs=1e-10)


def test_beta_zero_excludes_tv_from_gradient():
    truth_np, etot_np, g_np, pred0 = _toy_physics()
    truth = torch.from_numpy(truth_np).double()[None]
    pred = torch.from_numpy(pred0).double()[None].requires_grad_(True)
    loss, parts = mix_loss(pred, truth, 0.0)
    # value equals the visual objective alone
    with torch.no_grad():
        expected = float(((pred - truth) ** 2).mean() + (1 - ssim(pred, truth)[0] ** 2))
    assert float(loss) == pytest.approx(expected, rel=1e-12)
    assert parts["tv"] > 0  # still reported for monitoring


def test_mix_loss_rejects_bad_beta(small_bundle):
    tp = torch.zeros(1, small_bundle.grid_n, small_bundle.grid_n)
    with pytest.raises(ValueError):
        mix_loss(tp, tp, beta=1.2)


def test_infinite_alpha_contributes_nothing():
    truth_np, etot_np, g_np, pred0 = _toy_physics()
    truth = torch.from_numpy(truth_np).float()[None]
    pred = torch.from_numpy(pred0).float()[None]
    etot = torch.from_numpy(etot_np.astype(np.complex64))[None]
    g = torch.from_numpy(g_np.astype(np.complex64))
    with_alpha, _ = mix_loss(pred, truth, 0.0, alpha=torch.tensor([float("inf")]),
                             etot=etot, g_domain=g)
    without, _ = mix_loss(pred, truth, 0.0)
    assert float(with_alpha) == pytest.approx(float(without), rel=1e-6)
