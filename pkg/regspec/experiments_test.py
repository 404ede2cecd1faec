"""Unit tests for regspec.experiments."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import json
import math
from pathlib import Path

import pytest
import yaml

from regspec import experiments
from regspec.decomposition import TransitionRecord
from regspec.experiments import (
    ConfigError,
    ExperimentConfig,
    PropertyViolationError,
    TrialError,
    describe,
    format_cell,
    load_config,
    plan,
    run,
    validate,
)
from regspec.rng import trial_seed


def _transition(**overrides: object) -> dict:
    document = {
        "kind": "transition",
        "grid": {"d": [3], "n": [200, 400], "alpha": [1.0, 4.0]},
        "trials": 2,
        "master_seed": 11,
        "solver": {"center_depth": 3},
    }
    document.update(overrides)
    return document


def _keys(document: dict) -> list[str]:
    return [violation.key for violation in validate(document)]


def test_valid_config_has_no_violations() -> None:
    assert validate(_transition()) == []


def test_gamma_below_half_is_rejected() -> None:
    document = {
        "kind": "variational",
        "grid": {"d": [3], "L": [2], "gamma": [0.4, 0.5]},
        "trials": 1,
    }
    (violation,) = validate(document)
    assert violation.key == "grid.gamma"
    assert "gamma must be at least 1/2" in violation.message


def test_odd_degree_sum_is_rejected() -> None:
    violations = validate(_transition(grid={"d": [3], "n": [201], "alpha": [1.0]}))
    assert [v.key for v in violations] == ["grid.n"]
    assert "even" in violations[0].message


def test_empty_grid_is_rejected() -> None:
    assert "grid.alpha" in _keys(_transition(grid={"d": [3], "n": [200], "alpha": []}))


@pytest.mark.parametrize(
    ("override", "key"),
    [
        ({"kind": "spectra"}, "kind"),
        ({"trials": 0}, "trials"),
        ({"trials": True}, "trials"),
        ({"master_seed": -1}, "master_seed"),
        ({"colour": "red"}, "colour"),
        ({"solver": {"tol": "small"}}, "solver.tol"),
        ({"solver": {"step_rule": "newton"}}, "solver.step_rule"),
        ({"options": {"kappa": 0}}, "options.kappa"),
        ({"grid": {"d": [2], "n": [200], "alpha": [1.0]}}, "grid.d"),
        ({"grid": {"d": [3], "n": [200], "alpha": [1.0], "L": [2]}}, "grid.L"),
        ({"grid": {"d": [3], "n": [200]}}, "grid.alpha"),
        ({"grid": {"d": [3], "n": [2], "alpha": [1.0]}}, "grid.n"),
    ],
)
def test_violations_name_the_key(override: dict, key: str) -> None:
    assert key in _keys(_transition(**override))


def test_kind_specific_rules() -> None:
    tail = {
        "kind": "tailbound",
        "grid": {"alpha": [1.0], "m": [2], "b": [1.0], "L_offset": [1.0]},
        "trials": 100,
    }
    assert _keys(tail) == ["trials", "grid.b"]
    shattering = {"kind": "shattering", "grid": {"d": [3], "n": [100]}, "trials": 1}
    assert _keys(shattering) == ["grid.b"]
    shattering["options"] = {"b_schedule": "log_n_over_3"}
    assert _keys(shattering) == []
    shattering["options"] = {"b_schedule": "sqrt_n"}
    assert _keys(shattering) == ["options.b_schedule"]
    both = {
        "kind": "variational",
        "grid": {"d": [3], "L": [2], "gamma": [1.0], "alpha": [3.0]},
        "trials": 1,
    }
    assert _keys(both) == ["grid"]


def test_create_raises_config_error() -> None:
    with pytest.raises(ConfigError, match="grid.gamma") as info:
        ExperimentConfig.create(
            {
                "kind": "variational",
                "grid": {"d": [3], "L": [1], "gamma": [0.2]},
                "trials": 1,
            }
        )
    assert len(info.value.violations) == 1


def test_load_config_reads_json_and_yaml(tmp_path: Path) -> None:
    document = _transition(solver={"tol": 1e-9, "center_depth": 3})
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    config = load_config(str(path))
    assert config.solver["tol"] == 1e-9
    assert config.document == document

    path = tmp_path / "config.yaml"
    path.write_text(yaml.dump(_transition()), encoding="utf-8")
    assert load_config(str(path)).grid["n"] == (200, 400)

    path.write_text("[1, 2", encoding="utf-8")
    with pytest.raises(ConfigError, match="<document>"):
        load_config(str(path))
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(str(path))


def test_plan_orders_grid_then_trials() -> None:
    config = ExperimentConfig.create(_transition())
    jobs = plan(config)
    assert len(jobs) == 8
    points = [(job.task.n, job.task.alpha, job.task.trial) for job in jobs]
    assert points == [
        (n, alpha, t) for n in (200, 400) for alpha in (1.0, 4.0) for t in range(2)
    ]
    for job in jobs:
        assert job.task.seed == trial_seed(11, job.task.grid, job.task.trial)


def test_format_cell() -> None:
    assert format_cell(None) == ""
    assert format_cell(True) == "true"  # noqa: FBT003
    assert format_cell(3) == "3"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell("bb") == "bb"


def test_describe() -> None:
    stats = describe([1.0, 2.0, 3.0, 4.0])
    assert stats["count"] == 4
    assert (stats["q1"], stats["median"], stats["q3"]) == (1.75, 2.5, 3.25)
    assert stats["mean"] == 2.5
    sd = math.sqrt(5 / 3)
    assert stats["ci_half_width"] == pytest.approx(1.96 * sd / 2)
    assert describe([7.0])["ci_half_width"] == 0.0


def test_transition_run_writes_records_and_summary(tmp_path: Path) -> None:
    config = ExperimentConfig.create(_transition())
    result = run(config, out=str(tmp_path / "out" / "transition"), threads=1)
    lines = Path(result.csv_path).read_text(encoding="utf-8").splitlines()
    assert len(lines) == 9
    assert lines[0].startswith("schema_version,kind,n,d,alpha,grid,trial,seed,lambda1")
    assert all(line.startswith("1,transition,") for line in lines[1:])

    summary = json.loads(Path(result.summary_path).read_text(encoding="utf-8"))
    assert summary["schema_version"] == 1
    assert summary["config"] == config.document
    assert [group["key"] for group in summary["groups"]] == [
        {"d": 3, "n": n, "alpha": alpha} for n in (200, 400) for alpha in (1.0, 4.0)
    ]
    for group in summary["groups"]:
        assert group["count"] == 2
        assert set(group["measures"]["ratio"]) == {
            "count",
            "median",
            "q1",
            "q3",
            "mean",
            "ci_half_width",
        }
    (check,) = summary["checks"]
    assert check["name"] == "lambda_dominates_max_weight"
    assert check["passed"]


def test_output_is_byte_identical_across_worker_counts(tmp_path: Path) -> None:
    config = ExperimentConfig.create(_transition())
    first = run(config, out=str(tmp_path / "a"), threads=1)
    second = run(config, out=str(tmp_path / "b"), threads=2)
    pairs = [
        (first.csv_path, second.csv_path),
        (first.summary_path, second.summary_path),
    ]
    for left, right in pairs:
        assert Path(left).read_bytes() == Path(right).read_bytes()


def test_variational_run_matches_closed_form(tmp_path: Path) -> None:
    config = ExperimentConfig.create(
        {
            "kind": "variational",
            "grid": {"d": [3], "L": [1, 2, 3, 4, 5], "gamma": [1.0]},
            "trials": 1,
            "solver": {"restarts": 4},
        }
    )
    result = run(config, out=str(tmp_path / "variational"), threads=1)
    assert [record.L for record in result.records] == [1, 2, 3, 4, 5]
    for record in result.records:
        assert record.value == pytest.approx(0.7071068, abs=1e-6)
    names = {check.name: check.passed for check in result.checks}
    assert names == {"closed_form": True, "nondecreasing_in_depth": True}


def test_census_and_shattering_runs(tmp_path: Path) -> None:
    census = ExperimentConfig.create(
        {"kind": "census", "grid": {"d": [3], "n": [200], "radius": [1]}, "trials": 3}
    )
    result = run(census, out=str(tmp_path / "census"), threads=1)
    assert len(result.records) == 3
    assert all(record.radius == 1 for record in result.records)
    assert all(record.cyclic_cap == 16 for record in result.records)

    shattering = ExperimentConfig.create(
        {
            "kind": "shattering",
            "grid": {"d": [3], "n": [500]},
            "trials": 3,
            "options": {"b_schedule": "log_n_over_3"},
        }
    )
    result = run(shattering, out=str(tmp_path / "shattering"), threads=1)
    assert {record.b for record in result.records} == {math.log(500) / 3}
    assert [check.name for check in result.checks] == ["shattering_cap"]


def test_tailbound_run(tmp_path: Path) -> None:
    config = ExperimentConfig.create(
        {
            "kind": "tailbound",
            "grid": {"alpha": [1.0], "m": [1, 2], "b": [2.0], "L_offset": [1.0]},
            "trials": 10_000,
        }
    )
    result = run(config, out=str(tmp_path / "tail"), threads=1)
    single, double = result.records
    assert single.L == 3.0
    assert single.exact == pytest.approx(math.exp(-1.0))
    assert double.L == 5.0
    assert double.exact is None
    assert all(check.passed for check in result.checks)


def test_localization_run_passes_exact_checks(tmp_path: Path) -> None:
    config = ExperimentConfig.create(
        {
            "kind": "localization",
            "grid": {"d": [3], "n": [300], "alpha": [0.5, 3.0], "eps": [0.1]},
            "trials": 1,
        }
    )
    result = run(config, out=str(tmp_path / "localization"), threads=1)
    assert [check.name for check in result.checks] == [
        "lambda_dominates_max_weight",
        "light_part_bounded",
        "weyl_triangle",
    ]
    assert all(check.passed for check in result.checks)
    heavy, light = result.records
    assert heavy.disjoint_edges > 0
    assert light.disjoint_edges == 0


def test_yaml_summary(tmp_path: Path) -> None:
    config = ExperimentConfig.create(
        {"kind": "census", "grid": {"d": [3], "n": [100]}, "trials": 1}
    )
    out = str(tmp_path / "census")
    result = run(config, out=out, threads=1, summary_format="yaml")
    assert result.summary_path.endswith(".yaml")
    summary = yaml.safe_load(Path(result.summary_path).read_text(encoding="utf-8"))
    assert summary["kind"] == "census"
    assert summary["config"] == config.document


def test_violation_is_raised_after_writing(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    def broken(task: experiments.TransitionTask) -> TransitionRecord:
        return TransitionRecord(
            *task[:6],
            lambda1=0.0,
            residual=0.0,
            converged=True,
            max_abs_weight=1.0,
            ratio=0.0,
            lambda_dominates_max_weight=False,
            center=task.center,
            in_window=False,
            above_lower_tail=False,
            norm=None,
            norm_ratio=None,
        )

    monkeypatch.setitem(experiments._TRIALS, "transition", broken)  # noqa: SLF001
    config = ExperimentConfig.create(_transition())
    with pytest.raises(PropertyViolationError, match="lambda_dominates_max_weight"):
        run(config, out=str(tmp_path / "broken"), threads=1)
    assert (tmp_path / "broken.csv").exists()
    summary = json.loads((tmp_path / "broken.json").read_text(encoding="utf-8"))
    assert summary["checks"][0]["passed"] is False


def test_trial_errors_carry_context(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    def failing(task: experiments.CensusTask) -> None:
        msg = "boom"
        raise ValueError(msg)

    monkeypatch.setitem(experiments._TRIALS, "census", failing)  # noqa: SLF001
    config = ExperimentConfig.create(
        {"kind": "census", "grid": {"d": [3], "n": [100]}, "trials": 1}
    )
    with pytest.raises(TrialError, match=r"census trial CensusTask\(n=100.*boom"):
        run(config, out=str(tmp_path / "census"), threads=1)
