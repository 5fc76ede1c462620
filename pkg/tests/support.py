"""Test helpers: random PDDL generation, a brute-force reachability oracle, a stub completions server."""

from __future__ import annotations

import json
import threading
from collections import deque
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from itertools import product

import numpy as np

from cowp.pddl import (
    ActionSchema,
    Condition,
    DomainDescription,
    Literal,
    PredicateSchema,
    ProblemDescription,
)

NAME_CHARS = "abcdefghijklmnopqrstuvwxyz"


def _name(rng, taken: set, prefix: str = "") -> str:
    while True:
        n = int(rng.integers(1, 7))
        body = "".join(NAME_CHARS[int(i)] for i in rng.integers(0, 26, n))
        if rng.random() < 0.2:
            body += rng.choice(["_", "-"]) + str(int(rng.integers(0, 10)))
        name = prefix + body
        if name not in taken and name not in ("and", "not", "either", "object"):
            taken.add(name)
            return name


def random_domain(rng: np.random.Generator, max_preds: int = 5, max_actions: int = 4) -> DomainDescription:
    """A random valid domain in the supported subset (built directly, not parsed)."""
    taken: set[str] = set()
    types: list[tuple[str, str]] = []
    for _ in range(int(rng.integers(0, 4))):
        parent = "object" if not types or rng.random() < 0.5 else types[int(rng.integers(len(types)))][0]
        types.append((_name(rng, taken), parent))
    type_names = ["object"] + [t for t, _ in types]

    def pick_type():
        return type_names[int(rng.integers(len(type_names)))]

    constants = [(_name(rng, taken), pick_type()) for _ in range(int(rng.integers(0, 3)))]
    preds = []
    for _ in range(int(rng.integers(1, max_preds + 1))):
        arity = int(rng.integers(0, 3))
        preds.append(PredicateSchema(_name(rng, taken), tuple((f"?a{i}", pick_type()) for i in range(arity))))
    actions = []
    for _ in range(int(rng.integers(1, max_actions + 1))):
        params = tuple((f"?{_name(rng, set())}{i}", pick_type()) for i in range(int(rng.integers(0, 4))))
        terms = [v for v, _ in params] + [c for c, _ in constants]

        def lit(positive=True):
            p = preds[int(rng.integers(len(preds)))]
            if p.arity and not terms:
                return None
            args = tuple(terms[int(rng.integers(len(terms)))] for _ in range(p.arity))
            return Literal(p.name, args, positive)

        pre = [l for l in (lit(rng.random() < 0.7) for _ in range(int(rng.integers(0, 4)))) if l]
        eff: list[Literal] = []
        for _ in range(int(rng.integers(1, 4))):
            l = lit(rng.random() < 0.6)
            if l and l.negate() not in eff:
                eff.append(l)
        actions.append(ActionSchema(_name(rng, taken), params, Condition(tuple(pre)), Condition(tuple(eff))))
    reqs = [r for r in (":strips", ":typing", ":negative-preconditions") if rng.random() < 0.8]
    return DomainDescription(_name(rng, taken), tuple(reqs), tuple(types), tuple(constants), tuple(preds), tuple(actions))


def random_problem(rng: np.random.Generator, d: DomainDescription, n_objects: int = 4) -> ProblemDescription:
    taken = {c for c, _ in d.constants} | {t for t, _ in d.types} | {p.name for p in d.predicates}
    type_names = ["object"] + [t for t, _ in d.types]
    objects = [(_name(rng, taken, "o"), type_names[int(rng.integers(len(type_names)))]) for _ in range(n_objects)]
    universe = ground_atoms(d, objects)
    init = [a for a in universe if rng.random() < 0.4]
    goal = []
    if universe:
        for i in rng.choice(len(universe), size=min(len(universe), int(rng.integers(1, 4))), replace=False):
            goal.append(Literal(universe[int(i)].predicate, universe[int(i)].args, bool(rng.random() < 0.8)))
    return ProblemDescription(_name(rng, taken, "p"), d.name, tuple(objects), tuple(init), Condition(tuple(goal)))


def messy_domain_text(d: DomainDescription, rng: np.random.Generator) -> str:
    """Render ``d`` with irregular whitespace, comments and untyped groupings, unlike the printer."""

    def ws():
        return rng.choice([" ", "  ", "\n", "\t", " ; note\n "])

    def typed(pairs):
        # one "name - type" per entry; the canonical printer groups runs instead
        return ws().join(f"{n}{ws()}-{ws()}{t}" for n, t in pairs)

    def conj(c):
        lits = [str(l) for l in c]
        if len(lits) == 1 and rng.random() < 0.5:
            return lits[0]
        return "(and" + ws() + ws().join(lits) + ")"

    parts = [f"(define{ws()}(domain {d.name})"]
    if d.requirements:
        parts.append(f"(:requirements {' '.join(d.requirements)})")
    if d.types:
        parts.append(f"(:types{ws()}{typed(d.types)})")
    if d.constants:
        parts.append(f"(:constants {typed(d.constants)})")
    parts.append("(:predicates " + ws().join(f"({p.name} {typed(p.params)})" for p in d.predicates) + ")")
    for a in d.actions:
        parts.append(
            f"(:action {a.name}{ws()}:parameters ({typed(a.params)}){ws()}"
            f":precondition {conj(a.precondition)}{ws()}:effect {conj(a.effect)})"
        )
    return ws().join(parts) + ws() + ")"


# -- independent brute-force semantics ------------------------------------------


def _subtype(types: dict[str, str], t: str, ancestor: str) -> bool:
    seen = set()
    while True:
        if t == ancestor:
            return True
        if t == "object" or t in seen:
            return False
        seen.add(t)
        t = types.get(t, "object")


def ground_atoms(d: DomainDescription, objects) -> list[Literal]:
    types = dict(d.types)
    everything = list(d.constants) + list(objects)
    out = []
    for p in d.predicates:
        pools = [[n for n, t in everything if _subtype(types, t, pt)] for _, pt in p.params]
        for args in product(*pools):
            out.append(Literal(p.name, tuple(args)))
    return out


def bfs_reachable(d: DomainDescription, p: ProblemDescription, limit: int = 200_000) -> bool:
    """Exhaustive breadth-first search over states; True iff some reachable state meets the goal."""
    types = dict(d.types)
    everything = list(d.constants) + list(p.objects)
    steps = []
    for a in d.actions:
        pools = [[n for n, t in everything if _subtype(types, t, pt)] for _, pt in a.params]
        for binding in product(*pools):
            m = dict(zip((v for v, _ in a.params), binding))

            def sub(l, m=m):
                return (l.predicate, tuple(m.get(x, x) for x in l.args))

            steps.append(
                (
                    {sub(l) for l in a.precondition if l.positive},
                    {sub(l) for l in a.precondition if not l.positive},
                    {sub(l) for l in a.effect if l.positive},
                    {sub(l) for l in a.effect if not l.positive},
                )
            )
    goal_pos = {(l.predicate, l.args) for l in p.goal if l.positive}
    goal_neg = {(l.predicate, l.args) for l in p.goal if not l.positive}
    start = frozenset((l.predicate, l.args) for l in p.init)
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if goal_pos <= s and not (goal_neg & s):
            return True
        for pos, neg, add, dele in steps:
            if pos <= s and not (neg & s):
                t = frozenset((s - dele) | add)
                if t not in seen:
                    if len(seen) >= limit:
                        raise RuntimeError("state space larger than the oracle's limit")
                    seen.add(t)
                    queue.append(t)
    return False


# -- stub completions endpoint -----------------------------------------------------


class StubEndpoint:
    """Local HTTP server speaking the ``/completions`` protocol.

    ``script`` is a list of ``(status, payload)`` replies served in order;
    the last one repeats. Received requests are kept in ``requests``.
    """

    def __init__(self, script):
        self.script = list(script)
        self.requests: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                stub.requests.append({"path": self.path, "headers": dict(self.headers), "body": body})
                status, payload = stub.script[min(len(stub.requests), len(stub.script)) - 1]
                data = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


def completion(text: str) -> dict:
    return {"choices": [{"text": text, "index": 0}]}


def random_planning_instance(rng: np.random.Generator, max_objects: int = 8, max_atoms: int = 12):
    """Domain and problem with at most ``max_objects`` objects and ``max_atoms`` ground atoms."""
    while True:
        d = random_domain(rng, max_preds=4, max_actions=4)
        n = int(rng.integers(1, max_objects + 1))
        p = random_problem(rng, d, n)
        # effects may use arguments outside a predicate's declared types, so count untyped atoms
        n_terms = len(p.objects) + len(d.constants)
        universe = sum(n_terms ** pred.arity for pred in d.predicates)
        if n_terms <= max_objects and universe <= max_atoms:
            return d, p
