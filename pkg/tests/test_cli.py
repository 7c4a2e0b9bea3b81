import json

import pytest

from hyperbench import cli
from hyperbench.cli import (
    EXIT_CONFIG,
    EXIT_ERROR,
    EXIT_GUARD,
    EXIT_OK,
    ConstantsCommand,
    RunConfig,
    build_parser,
    config_from_args,
    execute,
    main,
)

FAST = {
    "witness": {"epsilon": 0.6, "truncation": 2000, "grid": 256, "alpha": 0.01},
    "constants": {},
    "findim": {"algebra": "ck:2", "samples": 2, "budget": 30, "restarts": 2},
    "cvp": {"group": "z:3", "samples": 2, "budget": 20},
}

NAMES = {
    "findim": {"chain_complex", "lambda_intertwining", "strong_b_lower", "hyperref_ratio", "cocycle_norm", "derivation_defect"},
    "cvp": {"commutant_dim", "commutant_ratio", "zero_product_step", "derivation_norm", "reflexivity"},
}


@pytest.mark.parametrize("command", sorted(FAST))
def test_every_command_writes_a_report(command, tmp_path):
    cfg = RunConfig(command=command, parameters=FAST[command], seed=1, output_path=tmp_path / f"{command}.json")
    result = execute(cfg)
    assert result["status"] == "success", result.get("message")
    assert result["path"].exists()
    report = result["report"]
    assert report.entries
    assert report.status != "fail"
    if command in NAMES:
        assert {e.name for e in report.entries} == NAMES[command]
    data = json.loads(result["path"].read_text())
    assert data["seed"] == 1 and data["command"] == command


def test_constants_report_lists_the_pipeline(tmp_path):
    result = execute(RunConfig(command="constants", output_path=tmp_path / "c.json"))
    names = [e.name for e in result["report"].entries]
    assert len(names) == 10
    assert names[-1] == "cvp_bound"


def test_reports_are_reproducible(tmp_path):
    paths = []
    for i in range(2):
        cfg = RunConfig(command="findim", parameters=FAST["findim"], seed=3, output_path=tmp_path / f"run{i}.json")
        paths.append(execute(cfg)["path"])
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("fmt", ["csv", "pdf"])
def test_other_formats(fmt, tmp_path):
    cfg = RunConfig(command="constants", output_path=tmp_path / f"c.{fmt}", format=fmt)
    result = execute(cfg)
    assert result["status"] == "success"
    assert result["path"].stat().st_size > 0


def test_invalid_parameters_are_config_errors(tmp_path):
    result = execute(RunConfig(command="findim", parameters={"degree": 5}, output_path=tmp_path / "f.json"))
    assert result["status"] == "error"
    assert result["exit_code"] == EXIT_CONFIG


def test_large_group_hits_the_guard(tmp_path):
    result = execute(RunConfig(command="cvp", parameters={"group": "z:65"}, output_path=tmp_path / "v.json"))
    assert result["exit_code"] == EXIT_GUARD


def test_default_output_path(monkeypatch, tmp_path):
    monkeypatch.setattr("hyperbench.config.REPORTS_DIR", str(tmp_path))
    cfg = RunConfig(command="cvp", seed=9, format="csv")
    assert cfg.resolved_output() == tmp_path / "cvp_seed9.csv"


def test_flags_override_the_config_file(tmp_path):
    conf = tmp_path / "run.env"
    conf.write_text("samples=7\nbudget=11\nseed=2\n")
    args = build_parser().parse_args(["findim", "--config", str(conf), "--samples", "3"])
    cfg = config_from_args(args)
    assert cfg.seed == 2
    assert cfg.parameters == {"samples": 3, "budget": "11"}


def test_main_exit_codes(tmp_path):
    assert main(["constants", "--output", str(tmp_path / "c.json")]) == EXIT_OK
    assert main(["constants", "--config", str(tmp_path / "missing.env")]) == EXIT_CONFIG
    conf = tmp_path / "bad.env"
    conf.write_text("bogus=1\n")
    assert main(["constants", "--config", str(conf), "--output", str(tmp_path / "b.json")]) == EXIT_CONFIG
    assert main(["cvp", "--group", "z:65", "--output", str(tmp_path / "v.json")]) == EXIT_GUARD


def test_findim_on_scalars(tmp_path):
    params = {"algebra": "scalars", "samples": 2, "budget": 20, "restarts": 2}
    result = execute(RunConfig(command="findim", parameters=params, output_path=tmp_path / "s.json"))
    assert result["status"] == "success", result.get("message")
    report = result["report"]
    assert report.status != "fail"
    strong_b = next(e for e in report.entries if e.name == "strong_b_lower")
    assert strong_b.bracket_lo == 0.0


def test_unexpected_errors_are_reported(monkeypatch, tmp_path):
    def broken(params, cfg):
        raise RuntimeError("lost the basis")

    monkeypatch.setitem(cli.COMMANDS, "constants", (ConstantsCommand, broken))
    result = execute(RunConfig(command="constants", output_path=tmp_path / "c.json"))
    assert result == {"status": "error", "message": "RuntimeError: lost the basis", "exit_code": EXIT_ERROR}
    assert main(["constants", "--output", str(tmp_path / "c.json")]) == EXIT_ERROR
