import json
import subprocess
import sys

import pytest

from cowp.cli import UsageError, build_config, main, read_config_file
from cowp.sim.fixtures import data_path

SERVE = data_path("tasks", "serve_water")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_plan_prints_numbered_steps(capsys):
    code, out, _ = run(capsys, "plan", "--task", "Serve water")
    assert code == 0
    assert out.splitlines()[0] == "S1: find robot cup kitchen" and len(out.splitlines()) == 7


def test_plan_from_files_as_json(capsys):
    code, out, _ = run(capsys, "plan", "--domain", str(SERVE / "domain.pddl"), "--problem", str(SERVE / "problem.pddl"), "--json")
    data = json.loads(out)
    assert code == 0 and data["status"] == "found" and len(data["steps"]) == 7


@pytest.mark.parametrize(
    "argv, code",
    [
        (["plan", "--task", "Serve water", "--budget", "2"], 3),
        (["plan", "--task", "Juggle"], 1),
        (["plan", "--task", "Serve water", "--frobnicate"], 1),
        (["plan", "--domain", str(SERVE / "domain.pddl")], 1),
        (["plan"], 1),
        (["nonsense"], 1),
        (["run", "--task", "Serve water", "--situation", "Kitchen door is locked.", "--spawn", "bowl"], 2),
        (["run", "--task", "Serve water", "--situation", "Cup is dirty.", "--spawn", "bowl,chair"], 0),
        (["run", "--task", "Serve water", "--spawn", "hovercraft"], 1),
        (["run", "--task", "Serve water", "--inject-prob", "2"], 1),
        (["run", "--task", "Serve water", "--oracle", "replay"], 1),
        (["trials", "--task", "Serve water", "--trials", "0"], 1),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_no_plan_exit_code(capsys, tmp_path):
    # fill now needs the cup both empty and not empty
    domain = (SERVE / "domain.pddl").read_text().replace("(is_empty ?c)\n", "(is_empty ?c) (not (is_empty ?c))\n", 1)
    assert domain != (SERVE / "domain.pddl").read_text()
    (tmp_path / "d.pddl").write_text(domain)
    (tmp_path / "p.pddl").write_text((SERVE / "problem.pddl").read_text())
    code, _, err = run(capsys, "plan", "--domain", str(tmp_path / "d.pddl"), "--problem", str(tmp_path / "p.pddl"))
    assert code == 2 and "no plan" in err


def test_bad_pddl_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.pddl"
    bad.write_text("(define (domain x) (:predicates (p))")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 1 and "invalid input" in err


def test_unreachable_remote_is_transport_error(capsys, monkeypatch):
    monkeypatch.setenv("COWP_TEST_KEY", "k")
    code, _, _ = run(
        capsys, "run", "--task", "Serve water", "--situation", "Cup is dirty.", "--spawn", "bowl",
        "--oracle", "remote", "--oracle-endpoint", "http://127.0.0.1:9/v1", "--oracle-credential-env", "COWP_TEST_KEY",
        "--oracle-retries", "1",
    )
    assert code == 4
    monkeypatch.delenv("COWP_TEST_KEY")
    code, _, _ = run(
        capsys, "monitor", "--task", "Serve water", "--plan", str(SERVE / "problem.pddl"), "--situation", "x",
        "--oracle", "remote", "--oracle-credential-env", "COWP_TEST_KEY",
    )
    assert code == 1  # the plan file is not a plan: input error comes first


def test_parse_round_trips(capsys):
    code, out, _ = run(capsys, "parse", str(SERVE / "domain.pddl"))
    assert code == 0 and out.startswith("(define (domain")
    code, out, _ = run(capsys, "parse", str(SERVE / "problem.pddl"), "--domain", str(SERVE / "domain.pddl"), "--json")
    assert code == 0 and json.loads(out)["kind"] == "problem"
    assert run(capsys, "parse", str(SERVE / "problem.pddl"))[0] == 1


def test_surgeon_prints_diff(capsys, tmp_path):
    script = tmp_path / "s.txt"
    script.write_text("precondition fill (not (is_dirty ?c))\ninit (is_dirty cup)\n")
    code, out, _ = run(capsys, "surgeon", "--task", "Serve water", "--script", str(script))
    assert code == 0
    diff = out.split("--- a/domain.pddl")[1]
    assert any(line.startswith("+") and "(not (is_dirty ?c))" in line for line in diff.splitlines())
    assert "--- a/problem.pddl" in out
    code, out, _ = run(capsys, "surgeon", "--task", "Serve water", "--script", str(script), "--json")
    assert [m["kind"] for m in json.loads(out)["mutations"]] == ["precondition-added", "init-fact-asserted"]
    script.write_text("teleport fill\n")
    assert run(capsys, "surgeon", "--task", "Serve water", "--script", str(script))[0] == 1


def test_monitor(capsys, tmp_path):
    steps = tmp_path / "plan.txt"
    code, out, _ = run(capsys, "plan", "--task", "Serve water")
    steps.write_text(out)
    code, out, _ = run(capsys, "monitor", "--task", "Serve water", "--plan", str(steps), "--situation", "Cup is dirty.")
    assert code == 0 and out.startswith("verdict: infeasible at step 5: fill robot cup faucet kitchen")
    code, out, _ = run(
        capsys, "monitor", "--task", "Serve water", "--plan", str(steps), "--situation", "Cup is dirty.",
        "--oracle", "always-yes", "--json",
    )
    data = json.loads(out)
    assert data["feasible"] and len(data["exchanges"]) == 7


def test_run_json_and_replay(capsys, tmp_path):
    log = tmp_path / "ex.jsonl"
    code, out, err = run(
        capsys, "run", "--task", "Serve water", "--situation", "Cup is dirty.", "--spawn", "bowl,glass",
        "--json", "--exchange-log", str(log),
    )
    live = json.loads(out)
    assert code == 0 and live["outcome"] == "completed" and "outcome: completed" in err
    assert len(log.read_text().splitlines()) == len(live["exchanges"])
    code, out, _ = run(
        capsys, "run", "--task", "Serve water", "--situation", "Cup is dirty.", "--spawn", "bowl,glass",
        "--json", "--oracle", "replay", "--exchanges", str(log),
    )
    assert code == 0 and json.loads(out)["executed"] == live["executed"]


def test_trials_json_and_records(capsys, tmp_path):
    records = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "trials", "--task", "Serve water", "--trials", "20", "--seed", "42", "--json",
                       "--records", str(records))
    m = json.loads(out)
    assert code == 0 and m["trials"] == 20
    assert m["completed"] + m["no_solution"] + m["failed"] == 20
    assert len(records.read_text().splitlines()) == 20
    code, out, _ = run(capsys, "trials", "--task", "Serve water", "--trials", "20", "--seed", "42")
    assert "Overall" in out and "[COWP]" in out


def test_report_from_metrics(capsys, tmp_path):
    for label, oracle in (("CW", "always-yes"), ("COWP", "mock")):
        _, out, _ = run(capsys, "trials", "--task", "Serve water", "--trials", "10", "--oracle", oracle, "--json")
        (tmp_path / f"{label}.json").write_text(out)
    code, out, _ = run(capsys, "report", "--metrics", str(tmp_path / "CW.json"), str(tmp_path / "COWP.json"))
    assert code == 0
    header = out.splitlines()[0]
    assert "CW completion (%)" in header and "COWP handling (%)" in header
    (tmp_path / "junk.json").write_text("{}")
    assert run(capsys, "report", "--metrics", str(tmp_path / "junk.json"))[0] == 1


# -- configuration -----------------------------------------------------------------


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "cowp.conf"
    cfg_file.write_text("# settings\nmax_steps = 10\nnode_budget = 100\noracle.temperature = 0.3\np = 0.2\n")
    env = {"COWP_NODE_BUDGET": "200", "COWP_ORACLE_TEMPERATURE": "0.4", "COWP_P": "0.25"}
    cfg = build_config({"node_budget": 300}, env, str(cfg_file))
    assert cfg.node_budget == 300  # flag
    assert cfg.oracle.temperature == 0.4 and cfg.p == 0.25  # environment
    assert cfg.max_steps == 10  # file
    assert cfg.acquisition_rounds == 3  # default
    cfg = build_config({}, {"COWP_CONFIG": str(cfg_file)})
    assert cfg.node_budget == 100 and cfg.oracle.temperature == 0.3


@pytest.mark.parametrize(
    "cli, env",
    [
        ({"node_budget": 0}, {}),
        ({"frobnicate": 1}, {}),
        ({}, {"COWP_P": "lots"}),
        ({}, {"COWP_LOG_LEVEL": "LOUD"}),
    ],
)
def test_config_errors(cli, env):
    with pytest.raises(UsageError):
        build_config(cli, env)


def test_unrelated_environment_is_ignored(tmp_path):
    assert build_config({}, {"COWP_LIVE_ENDPOINT": "x", "COWP_API_KEY": "k"}) == build_config({}, {})
    f = tmp_path / "c.conf"
    f.write_text("frobnicate = 1\n")
    with pytest.raises(UsageError, match="frobnicate"):
        build_config({}, {}, str(f))


def test_config_file_syntax(tmp_path):
    f = tmp_path / "c.conf"
    f.write_text("just words\n")
    with pytest.raises(UsageError, match="c.conf:1"):
        read_config_file(f)


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "cowp.cli", "plan", "--task", "Serve water"], capture_output=True, text=True)
    assert out.returncode == 0 and "S7: place robot cup table dining" in out.stdout
