"""Desk-scale experiments on networks with 10^5 vertices."""

# ruff: noqa: INP001

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import math
import statistics
from pathlib import Path

import pytest

from regspec.decomposition import DecompositionParams, network_for_trial, truncate
from regspec.experiments import ExperimentConfig, RunResult, run

pytestmark = pytest.mark.slow

_N = 10**5


def _run(tmp_path: Path, document: dict) -> RunResult:
    config = ExperimentConfig.create(document)
    return run(config, out=str(tmp_path / config.kind))


def _median_ratio(result: RunResult, **key: float) -> float:
    return statistics.median(
        record.ratio
        for record in result.records
        if all(getattr(record, name) == value for name, value in key.items())
    )


def test_heavy_tail_ratio_settles(tmp_path: Path) -> None:
    sizes = [10**3, 10**4, _N]
    result = _run(
        tmp_path,
        {
            "kind": "lln",
            "grid": {"d": [3], "n": sizes, "alpha": [1.0]},
            "trials": 20,
            "master_seed": 1,
        },
    )
    assert all(record.lambda_dominates_max_weight for record in result.records)
    medians = [_median_ratio(result, n=n) for n in sizes]
    assert medians == sorted(medians, reverse=True)
    assert 1.0 <= medians[-1] <= 1.6


def test_light_tail_ratio_exceeds_heavy_tail(tmp_path: Path) -> None:
    result = _run(
        tmp_path,
        {
            "kind": "transition",
            "grid": {"d": [3], "n": [_N], "alpha": [1.0, 4.0]},
            "trials": 20,
            "master_seed": 2,
        },
    )
    light = _median_ratio(result, alpha=4.0)
    assert light >= 1.1
    assert light > _median_ratio(result, alpha=1.0) - 0.2


def test_heavy_components_shatter(tmp_path: Path) -> None:
    result = _run(
        tmp_path,
        {
            "kind": "shattering",
            "grid": {"d": [3], "n": [_N]},
            "trials": 50,
            "master_seed": 3,
            "options": {"b_schedule": "log_n_over_3"},
        },
    )
    assert {record.bound for record in result.records} == {9}
    exceeded = sum(record.exceeded for record in result.records)
    assert exceeded <= 0.05 * len(result.records)


@pytest.mark.parametrize("unweighted", [False, True])
def test_localization_contrast(tmp_path: Path, *, unweighted: bool) -> None:
    result = _run(
        tmp_path,
        {
            "kind": "localization",
            "grid": {"d": [3], "n": [_N], "alpha": [1.0], "eps": [0.1]},
            "trials": 20,
            "master_seed": 4,
            "options": {"unweighted": unweighted},
        },
    )
    sizes = [record.min_support_size for record in result.records]
    if unweighted:
        hits = sum(size >= 0.3 * _N for size in sizes)
    else:
        hits = sum(size <= math.isqrt(_N) for size in sizes)
    assert hits >= 0.8 * len(sizes)


def test_kept_fraction_over_a_million_edges() -> None:
    b = 2.0
    network = network_for_trial(666_666, 3, 1.0, 9)
    heavy, _ = truncate(network, DecompositionParams.create(1.0, b))
    assert len(heavy) == 999_999
    p = math.exp(-b)
    assert abs(heavy.mean() - p) <= 3 * math.sqrt(p * (1 - p) / len(heavy))
