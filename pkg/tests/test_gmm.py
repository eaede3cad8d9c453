"""Scalar mixture model: contract examples, invariants, oracle agreement."""

import math

import pytest
from oracles import oracle_init, oracle_params, oracle_step

from bgsub.gmm import (
    BACKGROUND,
    FIXED_ALPHA,
    FOREGROUND,
    PDF_FAITHFUL,
    GaussianComponent,
    ModelParams,
    PixelModel,
    background_count,
    component_pdf,
    init_pixel_model,
    match_gaussian,
    process_pixel,
    rho_for,
    update_on_match,
    update_on_no_match,
)
import numpy as np


def test_init_pixel_model():
    p = ModelParams(var_init=225.0)
    m = init_pixel_model((100.0, 100.0, 100.0), p)
    assert m.live_count == 1
    c = m.components[0]
    assert c.weight == 1.0
    assert c.mean == (100.0, 100.0, 100.0)
    assert c.variance == 225.0


def test_init_at_black():
    m = init_pixel_model((0.0, 0.0, 0.0), ModelParams())
    assert m.components[0].mean == (0.0, 0.0, 0.0)
    assert sum(c.weight for c in m.components) == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k": 0},
        {"alpha": 0.0},
        {"alpha": 1.0},
        {"t": 0.0},
        {"t": 1.0},
        {"d": -1.0},
        {"var_init": 0.0},
        {"w_init": 0.0},
        {"w_init": 1.5},
        {"var_min": 0.0},
        {"rho_mode": "adaptive"},
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_match_within_radius():
    p = ModelParams(d=2.5)
    m = PixelModel([GaussianComponent(1.0, (100.0, 100.0, 100.0), 100.0)])
    # distance sqrt(300) ~ 17.32 against radius d*sigma = 25
    assert match_gaussian(m, (110.0, 110.0, 110.0), p) == 0


def test_match_outside_radius():
    p = ModelParams(d=2.5)
    m = PixelModel([GaussianComponent(1.0, (100.0, 100.0, 100.0), 100.0)])
    # distance sqrt(2700) ~ 51.96
    assert match_gaussian(m, (130.0, 130.0, 130.0), p) is None


def test_match_exact_mean():
    p = ModelParams()
    m = PixelModel([GaussianComponent(1.0, (42.0, 7.0, 99.0), 4.0)])
    assert match_gaussian(m, (42.0, 7.0, 99.0), p) == 0


def test_match_prefers_higher_rank():
    p = ModelParams()
    m = PixelModel(
        [
            GaussianComponent(0.6, (100.0, 100.0, 100.0), 100.0),
            GaussianComponent(0.4, (101.0, 100.0, 100.0), 100.0),
        ]
    )
    assert match_gaussian(m, (100.0, 100.0, 100.0), p) == 0


def test_match_does_not_mutate():
    p = ModelParams()
    m = PixelModel([GaussianComponent(1.0, (10.0, 20.0, 30.0), 50.0)])
    match_gaussian(m, (10.0, 20.0, 31.0), p)
    assert m.components[0].weight == 1.0
    assert m.components[0].mean == (10.0, 20.0, 30.0)
    assert m.components[0].variance == 50.0


def test_component_pdf_at_mean():
    c = GaussianComponent(1.0, (100.0, 100.0, 100.0), 100.0)
    expected = (2.0 * math.pi) ** -1.5 * 1e-3
    assert component_pdf(c, (100.0, 100.0, 100.0)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(6.3494e-5, rel=1e-4)


def test_component_pdf_decays_with_distance():
    c = GaussianComponent(1.0, (0.0, 0.0, 0.0), 100.0)
    near = component_pdf(c, (5.0, 0.0, 0.0))
    far = component_pdf(c, (10.0, 0.0, 0.0))
    assert near < component_pdf(c, (0.0, 0.0, 0.0))
    # adding 75 to the squared distance scales density by exp(-75/200)
    assert far == pytest.approx(near * math.exp(-75.0 / 200.0), rel=1e-12)


def test_rho_fixed_mode_ignores_z():
    p = ModelParams(alpha=0.05, rho_mode=FIXED_ALPHA)
    c = GaussianComponent(0.5, (100.0, 100.0, 100.0), 100.0)
    assert rho_for(c, (100.0, 100.0, 100.0), p) == 0.05
    assert rho_for(c, (250.0, 0.0, 0.0), p) == 0.05


def test_rho_pdf_mode_scales_by_density():
    p = ModelParams(alpha=0.05, rho_mode=PDF_FAITHFUL)
    c = GaussianComponent(0.5, (100.0, 100.0, 100.0), 100.0)
    rho = rho_for(c, (100.0, 100.0, 100.0), p)
    assert rho == pytest.approx(0.05 * (2.0 * math.pi) ** -1.5 * 1e-3, rel=1e-12)
    assert rho == pytest.approx(3.175e-6, rel=1e-3)


def test_rho_pdf_mode_clamps_to_one():
    p = ModelParams(alpha=0.05, rho_mode=PDF_FAITHFUL)
    spike = GaussianComponent(0.5, (10.0, 10.0, 10.0), 1e-9)
    assert rho_for(spike, (10.0, 10.0, 10.0), p) == 1.0


def test_update_on_match_worked_example():
    p = ModelParams(alpha=0.05, rho_mode=FIXED_ALPHA)
    m = PixelModel([GaussianComponent(0.5, (100.0, 100.0, 100.0), 100.0)])
    update_on_match(m, 0, (110.0, 110.0, 110.0), p)
    c = m.components[0]
    assert c.weight == pytest.approx(0.525, rel=1e-12)
    assert c.mean[0] == pytest.approx(100.5, rel=1e-12)
    assert c.mean[1] == pytest.approx(100.5, rel=1e-12)
    assert c.mean[2] == pytest.approx(100.5, rel=1e-12)
    # variance pulls toward the squared distance from the updated mean
    assert c.variance == pytest.approx(0.95 * 100.0 + 0.05 * (9.5**2 * 3), rel=1e-12)
    assert c.variance == pytest.approx(108.5375, rel=1e-12)


def test_update_on_match_zero_innovation_shrinks_variance():
    p = ModelParams(alpha=0.05)
    m = PixelModel([GaussianComponent(1.0, (50.0, 60.0, 70.0), 100.0)])
    update_on_match(m, 0, (50.0, 60.0, 70.0), p)
    c = m.components[0]
    assert c.mean == (50.0, 60.0, 70.0)
    assert c.variance == pytest.approx(95.0, rel=1e-12)


def test_update_on_match_variance_floor():
    p = ModelParams(alpha=0.5, var_min=4.0)
    m = PixelModel([GaussianComponent(1.0, (50.0, 60.0, 70.0), 4.5)])
    for _ in range(10):
        update_on_match(m, 0, (50.0, 60.0, 70.0), p)
    assert m.components[0].variance == 4.0


def test_update_on_match_decays_unmatched():
    p = ModelParams(alpha=0.1)
    m = PixelModel(
        [
            GaussianComponent(0.7, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.3, (200.0, 200.0, 200.0), 25.0),
        ]
    )
    update_on_match(m, 0, (0.0, 0.0, 0.0), p)
    weights = sorted(c.weight for c in m.components)
    assert weights[0] == pytest.approx(0.27, rel=1e-12)
    assert weights[1] == pytest.approx(0.73, rel=1e-12)


def test_update_on_match_rejects_dead_index():
    p = ModelParams()
    m = init_pixel_model((1.0, 2.0, 3.0), p)
    with pytest.raises(ValueError):
        update_on_match(m, 1, (1.0, 2.0, 3.0), p)
    with pytest.raises(ValueError):
        update_on_match(m, -1, (1.0, 2.0, 3.0), p)


def test_update_on_no_match_appends_below_capacity():
    p = ModelParams(k=3, alpha=0.05, w_init=0.05)
    m = init_pixel_model((10.0, 10.0, 10.0), p)
    update_on_no_match(m, (200.0, 30.0, 30.0), p)
    assert m.live_count == 2
    means = [c.mean for c in m.components]
    assert (200.0, 30.0, 30.0) in means
    assert sum(c.weight for c in m.components) == pytest.approx(1.0, abs=1e-12)


def test_update_on_no_match_replacement_worked_example():
    p = ModelParams(k=2, alpha=0.05, w_init=0.05)
    m = PixelModel(
        [
            GaussianComponent(0.7, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.3, (80.0, 80.0, 80.0), 25.0),
        ]
    )
    update_on_no_match(m, (200.0, 200.0, 200.0), p)
    assert m.live_count == 2
    by_weight = sorted(m.components, key=lambda c: c.weight)
    # survivor 0.7*0.95 = 0.665 and fresh 0.05, renormalized by 0.715
    assert by_weight[1].weight == pytest.approx(0.93007, rel=1e-4)
    assert by_weight[0].weight == pytest.approx(0.06993, rel=1e-4)
    assert by_weight[0].mean == (200.0, 200.0, 200.0)
    assert by_weight[0].variance == p.var_init


def test_update_on_no_match_replaces_lowest_weight_first_on_tie():
    p = ModelParams(k=2, alpha=0.05)
    a = GaussianComponent(0.5, (0.0, 0.0, 0.0), 25.0)
    b = GaussianComponent(0.5, (80.0, 80.0, 80.0), 25.0)
    m = PixelModel([a, b])
    update_on_no_match(m, (200.0, 200.0, 200.0), p)
    survivors = [c.mean for c in m.components]
    assert (80.0, 80.0, 80.0) in survivors  # first of the tie was replaced
    assert (0.0, 0.0, 0.0) not in survivors


def test_background_count_prefix():
    p7 = ModelParams(t=0.7)
    m = PixelModel(
        [
            GaussianComponent(0.5, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.3, (1.0, 1.0, 1.0), 25.0),
            GaussianComponent(0.2, (2.0, 2.0, 2.0), 25.0),
        ]
    )
    assert background_count(m, p7) == 2
    m2 = PixelModel(
        [
            GaussianComponent(0.9, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.1, (1.0, 1.0, 1.0), 25.0),
        ]
    )
    assert background_count(m2, p7) == 1


def test_background_count_strictly_greater():
    p = ModelParams(t=0.7)
    m = PixelModel(
        [
            GaussianComponent(0.7, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.3, (1.0, 1.0, 1.0), 25.0),
        ]
    )
    # prefix sum 0.7 is not strictly above t=0.7
    assert background_count(m, p) == 2


def test_background_count_degenerate_falls_back_to_live():
    p = ModelParams(t=0.95)
    m = PixelModel(
        [
            GaussianComponent(0.4, (0.0, 0.0, 0.0), 25.0),
            GaussianComponent(0.3, (1.0, 1.0, 1.0), 25.0),
        ]
    )
    assert background_count(m, p) == 2


def test_process_pixel_dominant_match_is_background():
    p = ModelParams()
    m = init_pixel_model((100.0, 100.0, 100.0), p)
    m, label, pos, b = process_pixel(m, (101.0, 100.0, 99.0), p)
    assert label == BACKGROUND
    assert pos == 0
    assert b >= 1


def test_process_pixel_replacement_is_foreground():
    p = ModelParams()
    m = init_pixel_model((100.0, 100.0, 100.0), p)
    m, label, pos, b = process_pixel(m, (250.0, 10.0, 10.0), p)
    assert label == FOREGROUND
    assert pos >= b


def test_constant_feed_stays_background():
    p = ModelParams()
    m = init_pixel_model((77.0, 40.0, 200.0), p)
    for _ in range(100):
        m, label, pos, b = process_pixel(m, (77.0, 40.0, 200.0), p)
        assert label == BACKGROUND


def _model_as_lists(m):
    return [{"w": c.weight, "m": list(c.mean), "v": c.variance} for c in m.components]


def _draw_value(rng):
    # near the main mode, near a second mode, or far away
    roll = rng.random()
    if roll < 0.5:
        return tuple(rng.normal(100.0, 4.0, 3))
    if roll < 0.8:
        return tuple(rng.normal(170.0, 4.0, 3))
    return tuple(rng.uniform(0.0, 255.0, 3))


@pytest.mark.parametrize("rho_mode", [FIXED_ALPHA, PDF_FAITHFUL])
def test_oracle_agreement_random_walk(rho_mode):
    p = ModelParams(alpha=0.04, rho_mode=rho_mode)
    op = oracle_params(alpha=0.04, rho_mode=rho_mode)
    rng = np.random.default_rng(11 if rho_mode == FIXED_ALPHA else 12)
    for _ in range(20):
        first = tuple(rng.uniform(0.0, 255.0, 3))
        m = init_pixel_model(first, p)
        ref = oracle_init(first, op)
        for _ in range(100):
            z = _draw_value(rng)
            m, label, pos, b = process_pixel(m, z, p)
            ref, rlabel, rpos, rb = oracle_step(ref, z, op)
            assert (label, pos, b) == (rlabel, rpos, rb)
            assert len(ref) == m.live_count
            for mine, theirs in zip(_model_as_lists(m), ref):
                assert mine["w"] == pytest.approx(theirs["w"], rel=1e-9)
                assert mine["v"] == pytest.approx(theirs["v"], rel=1e-9)
                for a, bb in zip(mine["m"], theirs["m"]):
                    assert a == pytest.approx(bb, rel=1e-9)
            # step invariants
            assert sum(c.weight for c in m.components) == pytest.approx(1.0, abs=1e-6)
            assert all(c.variance >= p.var_min for c in m.components)
            ranks = [c.weight / math.sqrt(c.variance) for c in m.components]
            assert ranks == sorted(ranks, reverse=True)
            assert m.live_count <= p.k
