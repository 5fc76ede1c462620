"""Command-line entry point: ``cowp <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 no solution, 3 resource
exhaustion, 4 oracle transport or authentication failure.

Settings resolve in the order command-line flag, ``COWP_*`` environment
variable, ``key=value`` config file (``--config`` or ``COWP_CONFIG``),
built-in default.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .engine import EpisodeResult, Outcome, run_episode
from .monitor import monitor_plan
from .oracle import (
    AlwaysYesBackend,
    AuthError,
    ExchangeLog,
    Lexicon,
    MockBackend,
    MockKnowledgeBase,
    Oracle,
    OracleConfig,
    OracleError,
    Phrasebook,
    RemoteBackend,
    ReplayBackend,
    read_jsonl,
)
from .pddl import PDDLError, parse_domain, parse_problem, serialize_domain, serialize_problem
from .planner import DEFAULT_NODE_BUDGET, PlanStatus, parse_plan_text, plan
from .sim import (
    TASKS,
    Metrics,
    ScriptedInjector,
    SimEnvironment,
    TaskFixture,
    TrialConfig,
    load_catalog,
    load_dataset,
    load_task_dir,
    run_trials,
    spawn_objects,
)
from .sim.dataset import MissingTask, canonical_task, task_slug
from .sim.environment import RandomInjector
from .sim.fixtures import data_dir as package_data_dir
from .sim.trials import comparison_table, engine_config_for
from .surgery import SurgeryError, apply_script, parse_script, unified_diff

log = logging.getLogger("cowp")

EXIT_OK, EXIT_USAGE, EXIT_NO_SOLUTION, EXIT_RESOURCE, EXIT_TRANSPORT = 0, 1, 2, 3, 4
ORACLES = ("mock", "remote", "always-yes", "replay")


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class AppConfig:
    oracle: OracleConfig = field(default_factory=OracleConfig)
    p: float = 0.1
    node_budget: int = DEFAULT_NODE_BUDGET
    acquisition_rounds: int = 3
    max_steps: int = 256
    max_planner_calls: int = 512
    data_dir: str = ""
    exchange_log: str = ""
    log_level: str = "WARNING"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        for name in ("node_budget", "acquisition_rounds", "max_steps", "max_planner_calls"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {self.log_level!r}")

    def engine_overrides(self) -> dict:
        return {
            "node_budget": self.node_budget,
            "acquisition_rounds": self.acquisition_rounds,
            "max_steps": self.max_steps,
            "max_planner_calls": self.max_planner_calls,
        }


_APP_FIELDS = {f.name: f.type for f in fields(AppConfig) if f.name != "oracle"}
_ORACLE_FIELDS = {f.name for f in fields(OracleConfig)}
_CAST = {"float": float, "int": int, "str": str}


def read_config_file(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment. Keys may carry an ``oracle.`` prefix."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        out[_key(key)] = value.strip()
    return out


def _key(name: str) -> str:
    name = name.strip().lower().replace("-", "_")
    return name[len("oracle."):] if name.startswith("oracle.") else name


def env_settings(environ: Mapping[str, str]) -> dict[str, str]:
    """Known settings from ``COWP_*`` variables; others (credentials, test switches) are left alone."""
    out = {}
    for name, value in environ.items():
        if not name.startswith("COWP_"):
            continue
        key = name[5:].lower()
        if key.startswith("oracle_") and key[7:] in _ORACLE_FIELDS:
            key = key[7:]
        if key in _APP_FIELDS or key in _ORACLE_FIELDS:
            out[key] = value
    return out


def build_config(
    cli: Mapping[str, object], environ: Mapping[str, str] | None = None, config_path: str | None = None
) -> AppConfig:
    environ = os.environ if environ is None else environ
    merged: dict[str, object] = {}
    path = config_path or environ.get("COWP_CONFIG")
    if path:
        merged.update(read_config_file(path))
    merged.update(env_settings(environ))
    merged.update({_key(k): v for k, v in cli.items() if v is not None})
    unknown = sorted(k for k in merged if k not in _APP_FIELDS and k not in _ORACLE_FIELDS)
    if unknown:
        raise UsageError(f"unknown setting(s): {', '.join(unknown)}")
    try:
        oracle = OracleConfig().with_overrides({k: v for k, v in merged.items() if k in _ORACLE_FIELDS})
        app = {k: _CAST[_APP_FIELDS[k]](v) for k, v in merged.items() if k in _APP_FIELDS}
        return AppConfig(oracle=oracle, **app)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad setting: {exc}") from None


# -- shared resources -------------------------------------------------------


class Resources:
    """Fixtures and data files, from the package or from ``data_dir``."""

    def __init__(self, data_dir: str = ""):
        self.root = Path(data_dir) if data_dir else package_data_dir()
        self._tasks: dict[str, TaskFixture] = {}

    def path(self, *parts: str) -> Path:
        return self.root.joinpath(*parts)

    def task(self, name: str) -> TaskFixture:
        try:
            canon = canonical_task(name)
        except MissingTask:
            raise UsageError(f"unknown task {name!r}; choose from: {', '.join(TASKS)}") from None
        if canon not in self._tasks:
            self._tasks[canon] = load_task_dir(self.path("tasks", task_slug(canon)), self.path("patterns.txt"))
        return self._tasks[canon]

    def kb(self) -> MockKnowledgeBase:
        return MockKnowledgeBase.load(self.path("mock.kb"))

    def judge(self) -> MockKnowledgeBase:
        return MockKnowledgeBase.load(self.path("judge_extra.kb"), self.path("mock.kb"))

    def lexicon(self) -> Lexicon:
        return Lexicon.load(self.path("lexicon.txt"))

    def phrasebook(self) -> Phrasebook:
        return Phrasebook.load(self.path("patterns.txt"))


def make_backend(kind: str, cfg: AppConfig, res: Resources, replay: str | None = None):
    if kind == "mock":
        return MockBackend(res.kb())
    if kind == "always-yes":
        return AlwaysYesBackend()
    if kind == "remote":
        return RemoteBackend(cfg.oracle)
    if kind == "replay":
        if not replay:
            raise UsageError("--oracle replay needs --exchanges FILE")
        return ReplayBackend(read_jsonl(replay))
    raise UsageError(f"unknown oracle {kind!r}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_pair(args, res: Resources, task: str | None = None):
    """Domain and problem from --domain/--problem, else from the bundled task."""
    if args.domain and args.problem:
        d = parse_domain(_read(args.domain))
        return d, parse_problem(_read(args.problem), d)
    if args.domain or args.problem:
        raise UsageError("--domain and --problem go together")
    if not task:
        raise UsageError("give --domain and --problem, or --task")
    fx = res.task(task)
    return fx.domain, fx.problem


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


# -- subcommands --------------------------------------------------------------


def cmd_parse(args, cfg: AppConfig, res: Resources) -> int:
    text = _read(args.file)
    is_problem = "(:domain" in text.replace(" ", "").lower() or args.domain
    if is_problem and not args.domain:
        raise UsageError("parsing a problem needs --domain")
    if args.domain:
        d = parse_domain(_read(args.domain))
        p = parse_problem(text, d)
        out, kind, name = serialize_problem(p), "problem", p.name
    else:
        d = parse_domain(text)
        out, kind, name = serialize_domain(d), "domain", d.name
    if args.json:
        _emit_json({"kind": kind, "name": name, "text": out})
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_plan(args, cfg: AppConfig, res: Resources) -> int:
    d, p = load_pair(args, res, args.task)
    out = plan(d, p, node_budget=cfg.node_budget)
    if args.json:
        _emit_json(
            {
                "status": out.status.value,
                "expanded": out.expanded,
                "steps": out.plan.names() if out.found else [],
            }
        )
    elif out.found:
        print(out.plan.format())
    if out.status is PlanStatus.NO_SOLUTION:
        print("no plan exists", file=sys.stderr)
        return EXIT_NO_SOLUTION
    if out.status is PlanStatus.RESOURCE_EXHAUSTED:
        print(f"search budget of {cfg.node_budget} nodes exhausted", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_surgeon(args, cfg: AppConfig, res: Resources) -> int:
    d, p = load_pair(args, res, args.task)
    script = parse_script(_read(args.script), d)
    d2, p2, surgery = apply_script(script, d, p)
    dom, prob = serialize_domain(d2), serialize_problem(p2)
    diff = unified_diff(serialize_domain(d), dom, "domain.pddl") + unified_diff(
        serialize_problem(p), prob, "problem.pddl"
    )
    if args.json:
        _emit_json({"domain": dom, "problem": prob, "diff": diff, "mutations": surgery.to_json()})
    else:
        sys.stdout.write(dom + "\n" + prob + "\n" + diff)
    return EXIT_OK


def _oracle(args, cfg: AppConfig, res: Resources) -> Oracle:
    backend = make_backend(args.oracle, cfg, res, getattr(args, "exchanges", None))
    return Oracle(backend, ExchangeLog(cfg.exchange_log or None))


def cmd_monitor(args, cfg: AppConfig, res: Resources) -> int:
    d, p = load_pair(args, res, args.task)
    steps = parse_plan_text(_read(args.plan), d, p)
    book = res.task(args.task).book if args.task else res.phrasebook()
    oracle = _oracle(args, cfg, res)
    verdict = monitor_plan(steps, args.situation, oracle, book)
    if args.json:
        _emit_json(
            {
                "feasible": verdict.feasible,
                "step": None if verdict.step is None else verdict.step + 1,
                "action": None if verdict.action is None else verdict.action.display(),
                "exchanges": [e.to_json() for e in oracle.log],
            }
        )
    else:
        print(f"verdict: {verdict}")
        for e in oracle.log:
            print(f"[{e.id}] {e.prompt}\n  -> {e.completion.strip()} ({e.verdict})")
    return EXIT_OK


def episode_env(fixture: TaskFixture, res: Resources, args, cfg: AppConfig, lexicon: Lexicon):
    """Simulator for one ``run``: spawned objects and situation source follow ``--seed``."""
    spawn_seq, step_seq, choice_seq = np.random.SeedSequence(args.seed).spawn(3)
    catalog = load_catalog(res.path("catalog.csv"))
    if args.spawn is not None:
        wanted = [w.strip().lower() for w in args.spawn.split(",") if w.strip()]
        by_name = {e.name.lower(): e for e in catalog} | {e.type_name: e for e in catalog}
        missing = [w for w in wanted if w not in by_name]
        if missing:
            raise UsageError(f"not in the object catalog: {', '.join(missing)}")
        spawned = [by_name[w] for w in wanted]
    else:
        spawned = spawn_objects(catalog, spawn_seq)
    if args.situation:
        injector = ScriptedInjector(args.situation, args.at_step)
    else:
        p = cfg.p if args.inject_prob is None else args.inject_prob
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"--inject-prob must lie in [0, 1], got {p}")
        dataset = load_dataset(res.path("situations"))
        injector = RandomInjector(
            dataset, fixture.name, p, np.random.default_rng(step_seq), np.random.default_rng(choice_seq)
        )
    return SimEnvironment(fixture, spawned, res.judge(), lexicon, injector)


def _episode_exit(result: EpisodeResult) -> int:
    if result.outcome is Outcome.COMPLETED:
        return EXIT_OK
    if result.cause in ("transport", "auth"):
        return EXIT_TRANSPORT
    if result.cause == "resource":
        return EXIT_RESOURCE
    return EXIT_NO_SOLUTION


def cmd_run(args, cfg: AppConfig, res: Resources) -> int:
    fixture = res.task(args.task)
    if args.domain or args.problem:
        d, p = load_pair(args, res)
        fixture = dataclasses.replace(fixture, domain=d, problem=p)
    lexicon = res.lexicon()
    env = episode_env(fixture, res, args, cfg, lexicon)
    oracle = _oracle(args, cfg, res)
    engine = engine_config_for(fixture, lexicon, **cfg.engine_overrides())
    result = run_episode(fixture.domain, fixture.problem, env, oracle, engine)
    if args.json:
        _emit_json(result.to_json())
        print(result.transcript(), file=sys.stderr)
    else:
        print(result.transcript())
    return _episode_exit(result)


def _task_list(names: Sequence[str] | None) -> list[str]:
    if not names or any(n.lower() == "all" for n in names):
        return list(TASKS)
    return names


def _run_many(tasks: list[str], oracle_kind: str, args, cfg: AppConfig, res: Resources):
    catalog = load_catalog(res.path("catalog.csv"))
    dataset = load_dataset(res.path("situations"))
    judge, lexicon = res.judge(), res.lexicon()
    backend = make_backend(oracle_kind, cfg, res, getattr(args, "exchanges", None))
    p = cfg.p if args.p is None else args.p
    records = []
    for name in tasks:
        fixture = res.task(name)
        try:
            tc = TrialConfig(fixture.name, args.seed, p, oracle_kind, args.trials, args.jobs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        engine = engine_config_for(fixture, lexicon, **cfg.engine_overrides())
        _, recs = run_trials(tc, fixture, dataset, catalog, backend, judge, engine)
        records.extend(recs)
    return Metrics.aggregate(records), records


def _trials_exit(records) -> int:
    causes = {r.cause for r in records}
    if causes & {"transport", "auth"}:
        return EXIT_TRANSPORT
    return EXIT_OK


def cmd_trials(args, cfg: AppConfig, res: Resources) -> int:
    tasks = _task_list(args.task)
    metrics, records = _run_many(tasks, args.oracle, args, cfg, res)
    if args.records:
        with open(args.records, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(dataclasses.asdict(r)) + "\n")
    if args.json:
        _emit_json(metrics.to_json())
    else:
        print(metrics.table("COWP" if args.oracle != "always-yes" else "CW"))
    return _trials_exit(records)


def cmd_report(args, cfg: AppConfig, res: Resources) -> int:
    """Side-by-side CW / COWP table, from saved metrics files or a fresh run."""
    if args.metrics:
        named = {}
        for path in args.metrics:
            try:
                named[Path(path).stem] = Metrics.from_json(json.loads(_read(path)))
            except (ValueError, KeyError, TypeError) as exc:
                raise UsageError(f"{path}: not a metrics document ({exc})") from None
    else:
        tasks = _task_list(args.task)
        named, exit_code = {}, EXIT_OK
        for label, kind in (("CW", "always-yes"), ("COWP", args.oracle)):
            named[label], records = _run_many(tasks, kind, args, cfg, res)
            exit_code = max(exit_code, _trials_exit(records))
        if exit_code:
            return exit_code
    if args.json:
        _emit_json({label: m.to_json() for label, m in named.items()})
    else:
        print(comparison_table(named))
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("settings")
    g.add_argument("--config", help="key=value settings file")
    g.add_argument("--data-dir", help="directory with tasks/, situations/ and the data files")
    g.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    g.add_argument("--exchange-log", help="append oracle exchanges to this JSON-lines file")
    g.add_argument("--node-budget", "--budget", dest="node_budget", type=int, help="planner node budget")
    g.add_argument("--acquisition-rounds", type=int)
    g.add_argument("--max-steps", type=int, help="executed-step watchdog")
    for f in fields(OracleConfig):
        g.add_argument(f"--oracle-{f.name.replace('_', '-')}", dest=f"oracle_{f.name}", type=_CAST[f.type])


def _pair(sp: argparse.ArgumentParser, task_help: str = "use a bundled task's domain and problem") -> None:
    sp.add_argument("--domain", help="domain PDDL file")
    sp.add_argument("--problem", help="problem PDDL file")
    sp.add_argument("--task", help=task_help)


def _oracle_arg(sp: argparse.ArgumentParser, default: str = "mock") -> None:
    sp.add_argument("--oracle", choices=ORACLES, default=default)
    sp.add_argument("--exchanges", help="JSON-lines exchange log served by --oracle replay")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cowp", description="Open-world task planning with an oracle for situations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("parse", help="parse a PDDL file and print it in canonical form")
    sp.add_argument("file")
    sp.add_argument("--domain", help="domain file, when FILE is a problem")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("plan", help="plan and print steps as S1: ...")
    _pair(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("surgeon", help="apply a mutation script and print the result with a diff")
    _pair(sp)
    sp.add_argument("--script", required=True, help="one mutation per line")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_surgeon)

    sp = sub.add_parser("monitor", help="ask the oracle about each step of a plan under a situation")
    _pair(sp, "bundled task (domain, problem and phrasing)")
    sp.add_argument("--plan", required=True, help="plan file, one step per line")
    sp.add_argument("--situation", required=True)
    _oracle_arg(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_monitor)

    sp = sub.add_parser("run", help="run one episode in the simulator")
    _pair(sp, "task name, e.g. 'Serve water'")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--situation", help="report this situation before step --at-step")
    src.add_argument("--inject-prob", type=float, help="random injection probability per step")
    sp.add_argument("--at-step", type=int, default=0, help="0-based step for --situation")
    sp.add_argument("--spawn", help="comma-separated catalog objects to spawn instead of a random half")
    _oracle_arg(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_run)

    for name, func, helptext in (
        ("trials", cmd_trials, "seeded trials with completion and situation-handling metrics"),
        ("report", cmd_report, "closed-world baseline next to the oracle-backed planner"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--task", action="append", help="task name (repeatable) or 'all' (default)")
        sp.add_argument("--trials", type=int, default=150, help="trials per task")
        _oracle_arg(sp)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--p", type=float, help="injection probability per step")
        sp.add_argument("--json", action="store_true")
        if name == "trials":
            sp.add_argument("--records", help="write one JSON line per trial here")
        else:
            sp.add_argument("--metrics", nargs="+", help="render saved 'trials --json' documents instead")
        sp.set_defaults(func=func)

    for sp in sub.choices.values():
        _common(sp)
    return parser


def _cli_settings(args) -> dict:
    keys = ["data_dir", "log_level", "exchange_log", "node_budget", "acquisition_rounds", "max_steps"]
    out = {k: getattr(args, k, None) for k in keys}
    for f in fields(OracleConfig):
        out[f.name] = getattr(args, f"oracle_{f.name}", None)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(_cli_settings(args), config_path=args.config)
        logging.basicConfig(level=cfg.log_level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        return args.func(args, cfg, Resources(cfg.data_dir))
    except UsageError as exc:
        print(f"cowp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PDDLError, SurgeryError, ValueError) as exc:
        print(f"cowp: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AuthError as exc:
        print(f"cowp: authentication failed: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except OracleError as exc:
        print(f"cowp: oracle unavailable: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
