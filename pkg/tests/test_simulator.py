import dataclasses
import math

import numpy as np
import pytest

from intrablock.config import ConfigError, ExperimentConfig, Scheme, preset
from intrablock.expected_rank import expected_rank
from intrablock.ge_channel import GEModel
from intrablock.interleaver import ALL_OBJECTIVES, DispersionObjective
from intrablock.simulator import (
    CSV_HEADER,
    group_variance,
    run_experiment,
    simulate_block_hop,
)

OBJ = DispersionObjective()
BURSTY = GEModel(0.1, 0.1, 0.1, 0.8)


def test_scheme_enum_has_three_values():
    assert [s.value for s in Scheme] == ["BR-BI", "AR-SI", "AR-IBI"]


@pytest.mark.parametrize("scheme", list(Scheme))
def test_lossless_link(scheme):
    clean = GEModel(0.1, 0.1, 0.0, 0.0)
    rng = np.random.default_rng(0)
    assert simulate_block_hop(scheme, (4, 4, 4, 4), clean, OBJ, 16, rng) == (4, 4, 4, 4)
    assert simulate_block_hop(scheme, (4, 2, 4, 4), clean, OBJ, 16, rng)[1] == 2
    # fewer packets than rank: every packet lands, so the ranks add up to T
    short = simulate_block_hop(scheme, (4, 4), clean, OBJ, 4, rng)
    assert sum(short) == 4
    if scheme is Scheme.BR_BI:
        assert short == (2, 2)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_dead_link(scheme):
    dead = GEModel(0.1, 0.1, 1.0, 1.0)
    assert simulate_block_hop(scheme, (4, 3, 2, 1), dead, OBJ, 16, np.random.default_rng(0)) == (0, 0, 0, 0)


def test_baseline_needs_divisible_budget():
    with pytest.raises(ConfigError):
        simulate_block_hop(Scheme.BR_BI, (4, 4, 4), BURSTY, OBJ, 10, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(M=4, L=3, T=10, model=BURSTY, blocks=2))


@pytest.mark.parametrize("scheme", list(Scheme))
def test_single_batch_mean_matches_analytic_rank(scheme):
    rng = np.random.default_rng(11)
    trials = 100_000
    total = sum(sum(simulate_block_hop(scheme, (4,), BURSTY, OBJ, 4, rng)) for _ in range(trials))
    assert total / trials == pytest.approx(expected_rank(4, [1, 2, 3, 4], BURSTY), abs=0.01)


def test_ranks_never_increase():
    rng = np.random.default_rng(5)
    for scheme in Scheme:
        ranks = (8,) * 8
        for _ in range(6):
            nxt = simulate_block_hop(scheme, ranks, BURSTY, OBJ, 64, rng)
            assert all(0 <= b <= a for a, b in zip(ranks, nxt))
            ranks = nxt


def test_zero_hops_reports_full_throughput():
    report = run_experiment(ExperimentConfig(M=4, L=4, model=BURSTY, hops=0, blocks=50))
    assert len(report.rows) == 3
    assert all(r.mean_throughput == 1.0 and r.hop == 0 for r in report.rows)


def test_report_is_deterministic_and_well_formed():
    cfg = ExperimentConfig(M=4, L=4, model=BURSTY, hops=3, blocks=250, seed=9)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a == b
    assert a.to_csv() == b.to_csv()
    lines = a.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 3 * 4
    for scheme in Scheme:
        curve = a.curve(scheme)
        assert curve[0] == 1.0
        assert ((curve >= 0) & (curve <= 1)).all()
        assert (np.diff(curve) <= 0).all()
    assert a.get("AR-IBI", 3).blocks == 250
    assert run_experiment(dataclasses.replace(cfg, seed=10)) != a


def test_group_variance():
    x = np.repeat([0.1, 0.3], 100)
    assert group_variance(x, 100) == pytest.approx(0.02)
    assert math.isnan(group_variance(np.ones(150), 100))
    assert group_variance(np.r_[x, 5.0], 100) == pytest.approx(0.02)  # partial group ignored


def test_objectives_give_nearly_the_same_throughput():
    model = preset("table1:eps35_abel2")
    means = [
        run_experiment(
            ExperimentConfig(M=4, L=4, model=model, hops=4, blocks=2000, objective=obj, schemes=(Scheme.AR_IBI,))
        ).get(Scheme.AR_IBI, 4).mean_throughput
        for obj in ALL_OBJECTIVES
    ]
    assert max(means) - min(means) < 0.01


def test_group_variance_order_of_magnitude():
    report = run_experiment(
        ExperimentConfig(M=4, L=4, model=preset("table1:eps35_abel2"), hops=4, blocks=2000, schemes=(Scheme.AR_IBI,))
    )
    assert 1e-6 <= report.get(Scheme.AR_IBI, 4).group_variance <= 1e-3
