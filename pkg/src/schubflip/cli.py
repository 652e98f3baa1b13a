"""Command-line front end: ``schubflip {components,orbits,general,verify} ...``.

Every report lists the statements it checked, each labelled THEOREM-CHECK or
CONJECTURE-CHECK.  Only a failed THEOREM-CHECK makes the exit status 1; a
conjecture that fails is a result, not an error.  Exit status 2 means a usage
or resource problem.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .engine import ENGINES
from .words import ResourceError, build_move_graph, longest_element

SCHEMA = 1
CACHE_ENV = "SCHUBFLIP_CACHE_DIR"
THEOREM = "THEOREM-CHECK"
CONJECTURE = "CONJECTURE-CHECK"
SUITES = ("moves", "signs", "transport", "cycles", "basis", "group", "induced", "form")
RANDOMIZED = ("moves", "signs")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    k: int | None = None
    w: list[int] | None = None
    suite: str | None = None
    engine: str = "bfs"
    threads: int = 1
    memory_cap: int | None = None
    seed: int | None = None
    trials: int | None = None
    timings: bool = False
    output_format: str = "json"
    cache_dir: str | None = None
    dump_diagram: str | None = None

    def cache_key(self) -> str:
        params = asdict(self)
        for local in ("output_format", "cache_dir", "dump_diagram"):
            params.pop(local)
        blob = json.dumps({"params": params, "version": __version__, "schema": SCHEMA},
                          sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    config: RunConfig
    checks: list[dict] = field(default_factory=list)
    result: dict = field(default_factory=dict)

    def check(self, label: str, name: str, ok: bool, **detail) -> None:
        self.checks.append({"label": label, "name": name, "ok": bool(ok), **detail})

    def to_dict(self) -> dict:
        params = {k: v for k, v in asdict(self.config).items()
                  if v is not None and k not in ("command", "output_format", "cache_dir", "dump_diagram")}
        return {"schema": SCHEMA, "version": __version__, "command": self.config.command,
                "params": params, "checks": self.checks, "result": self.result}


def exit_status(doc: dict) -> int:
    return 1 if any(c["label"] == THEOREM and not c["ok"] for c in doc["checks"]) else 0


# ---------------------------------------------------------------------------
# commands

def _dump(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text + "\n")


def cmd_components(cfg: RunConfig) -> Report:
    from .fliporbits import count_orbits, main_conjecture_value
    from .signs import covering_components, gamma_components
    from .wiring import diagram_json, diagram_of, v0_word

    n = cfg.n
    if n is None or n < 3:
        raise UsageError("components needs --n >= 3")
    rep = Report(cfg)
    if cfg.dump_diagram:
        _dump(cfg.dump_diagram, diagram_json(diagram_of(v0_word(n), n)))
    orbits = count_orbits(n - 1, cfg.engine, cfg.threads, memory_cap=cfg.memory_cap)
    routes = {"matrix_orbits": orbits.orbit_count}
    if n <= 5:
        routes["covering_components"] = covering_components(n)
        routes["fiber_components"] = gamma_components(v0_word(n), cfg.engine, cfg.threads)
        rep.check(THEOREM, "three routes agree", len(set(routes.values())) == 1, values=routes)
    rep.result = {"n": n, "components": orbits.orbit_count, "routes": routes,
                  "orbits": orbits.to_dict(cfg.timings)}
    if n >= 6:
        want = main_conjecture_value(n)
        rep.check(CONJECTURE, f"component count equals 3*2^(n-1) = {want}",
                  orbits.orbit_count == want, predicted=want, computed=orbits.orbit_count)
    return rep


def cmd_orbits(cfg: RunConfig) -> Report:
    from .fliporbits import check_orbit_structure, count_orbits, main_conjecture_value

    k = cfg.k
    if k is None or k < 1:
        raise UsageError("orbits needs --k >= 1")
    rep = Report(cfg)
    orbits = count_orbits(k, cfg.engine, cfg.threads, memory_cap=cfg.memory_cap)
    rep.result = {"orbits": orbits.to_dict(cfg.timings)}
    if k >= 5:
        want = main_conjecture_value(k + 1)
        rep.check(CONJECTURE, f"orbit count equals {want}", orbits.orbit_count == want,
                  predicted=want, computed=orbits.orbit_count)
        structure = check_orbit_structure(k, report=orbits)
        rep.result["structure"] = structure
        rep.check(CONJECTURE, "orbit length histogram", structure["match"],
                  buckets=structure["buckets"])
    return rep


def cmd_general(cfg: RunConfig) -> Report:
    from .fliporbits import count_orbits, general_action, general_orbits
    from .wiring import diagram_json

    w = cfg.w
    if not w or sorted(w) != list(range(1, len(w) + 1)):
        raise UsageError(f"--w must be a permutation of 1..n in one-line notation, got {w}")
    rep = Report(cfg)
    act = general_action(w)
    if cfg.dump_diagram:
        _dump(cfg.dump_diagram, diagram_json(act.arrangement.diagram, act.arrangement.regions))
    orbits = general_orbits(w, cfg.engine, cfg.threads, memory_cap=cfg.memory_cap)
    rep.result = {"w": list(w), "crossings": len(act.arrangement.points),
                  "regions": len(act.arrangement.regions), "orbits": orbits.to_dict(cfg.timings)}
    n = len(w)
    if tuple(w) == longest_element(n) and n >= 2:
        same = count_orbits(n - 1, cfg.engine, cfg.threads, memory_cap=cfg.memory_cap)
        rep.check(THEOREM, "longest element agrees with matrix orbits",
                  same.orbit_count == orbits.orbit_count,
                  values=[orbits.orbit_count, same.orbit_count])
    if not act.arrangement.regions:
        rep.check(THEOREM, "no regions: every sign vector is fixed",
                  orbits.orbit_count == 2 ** len(act.arrangement.points))
    return rep


def _need(value, flag: str, suite: str):
    if value is None:
        raise UsageError(f"suite {suite!r} needs {flag}")
    return value


def _suite_moves(cfg: RunConfig, rep: Report) -> None:
    from .lusztig import check_monomiality, random_move_trials

    n = cfg.n or 4
    trials = random_move_trials(n, cfg.trials or 10_000, cfg.seed)
    rep.check(THEOREM, "matrix product invariant under moves", not trials["violations"],
              trials=trials["trials"], moves=trials["moves"], violations=trials["violations"][:5])
    g = build_move_graph(n)
    bad = [list(w) for w in g.classes if not check_monomiality(w, n, seed=cfg.seed)["ok"]]
    rep.check(THEOREM, "corner minors are monomials", not bad, classes=len(g.classes),
              violations=bad[:5])
    rep.result = {"n": n, "moves": trials["moves"], "classes": len(g.classes)}


def _suite_signs(cfg: RunConfig, rep: Report) -> None:
    from .lusztig import realize_sign_transitions, sign_bridge

    n = cfg.n or 4
    real = realize_sign_transitions(cfg.trials or 2000, cfg.seed)
    rep.check(THEOREM, "each branching sign change is realised", real["all_realized"],
              branching=real["branching"])
    rep.check(THEOREM, "forced sign changes are forced", real["all_forced"], forced=real["forced"])
    rng = random.Random(cfg.seed)
    g = build_move_graph(n)
    bad = []
    for w in g.classes:
        t = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for _ in w]
        if not sign_bridge(w, t, n):
            bad.append({"word": list(w), "t": [str(x) for x in t]})
    rep.check(THEOREM, "minor signs follow parameter signs", not bad, classes=len(g.classes),
              violations=bad[:5])
    rep.result = {"n": n}


def _suite_transport(cfg: RunConfig, rep: Report) -> None:
    from .signs import verify_flip_transport

    r = verify_flip_transport(cfg.n or 4)
    rep.check(THEOREM, "flip transport: exactly one outcome", not r["violations"],
              cases=r["cases_checked"], violations=r["violations"][:5])
    rep.result = {k: v for k, v in r.items() if k != "violations"}


def _suite_cycles(cfg: RunConfig, rep: Report) -> None:
    from .signs import verify_4_cycles, verify_8_cycles

    n = cfg.n or 4
    g = build_move_graph(n)
    four = verify_4_cycles(n, g)
    eight = verify_8_cycles(n, g)
    rep.check(THEOREM, "four-cycle lifts close", not four["violations"],
              cycles=four["cycles"], cases=four["cases_checked"], violations=four["violations"][:5])
    rep.check(THEOREM, "eight-cycle lift ends share a fiber component", not eight["violations"],
              cycles=eight["cycles"], cases=eight["cases_checked"],
              violations=eight["violations"][:5])
    if eight["cycles"]:
        rep.check(THEOREM, "some eight-cycle lift does not close", eight["open_lifts"] > 0,
                  witness=eight["open_witness"])
    rep.result = {"n": n, "four_cycles": four["cycles"], "eight_cycles": eight["cycles"],
                  "open_lifts": eight["open_lifts"]}


def _suite_basis(cfg: RunConfig, rep: Report) -> None:
    from .signs import verify_cycle_basis

    r = verify_cycle_basis(cfg.n or 4)
    rep.check(THEOREM, "short cycles span the cycle space", r["spans"],
              rank=r["rank"], dimension=r["cycle_space_dimension"])
    rep.result = {k: v for k, v in r.items() if k != "violations"}


def _suite_group(cfg: RunConfig, rep: Report) -> None:
    from .fliporbits import check_group_properties

    r = check_group_properties(cfg.k or 4)
    rep.check(THEOREM, "generator relations", not r["violations"], violations=r["violations"][:5])
    rep.result = {k: v for k, v in r.items() if k != "violations"}


def _suite_induced(cfg: RunConfig, rep: Report) -> None:
    from .fliporbits import induced_action

    r = induced_action(cfg.k or 4)
    rep.check(THEOREM, "kernel is invariant", r["kernel_invariant"])
    rep.check(THEOREM, "quotient action adds to hex neighbours", r["neighbour_rule"],
              violations=r["violations"][:5])
    rep.result = {k: v for k, v in r.items() if k != "violations"}


def _suite_form(cfg: RunConfig, rep: Report) -> None:
    from .fliporbits import find_invariant_form

    r = find_invariant_form(cfg.n or 5)
    for name, v in r["variants"].items():
        rep.check(CONJECTURE, f"{name} action fixes an alternating form of corank "
                  f"{r['expected_corank']}", v["matches_expected"],
                  solution_dimension=v["solution_dimension"], min_corank=v["min_corank"])
    rep.result = r


_SUITES = {
    "moves": _suite_moves, "signs": _suite_signs, "transport": _suite_transport,
    "cycles": _suite_cycles, "basis": _suite_basis, "group": _suite_group,
    "induced": _suite_induced, "form": _suite_form,
}


def cmd_verify(cfg: RunConfig) -> Report:
    if cfg.suite not in _SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {SUITES}")
    if cfg.suite in RANDOMIZED:
        _need(cfg.seed, "--seed", cfg.suite)
    rep = Report(cfg)
    _SUITES[cfg.suite](cfg, rep)
    return rep


COMMANDS = {"components": cmd_components, "orbits": cmd_orbits, "general": cmd_general,
            "verify": cmd_verify}


# ---------------------------------------------------------------------------
# output

def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["section", "key", "value"])
        for key, value in sorted(doc["params"].items()):
            out.writerow(["param", key, value if isinstance(value, (int, str)) else json.dumps(value)])
        for c in doc["checks"]:
            out.writerow([c["label"], c["name"], "PASS" if c["ok"] else "FAIL"])
        orbits = doc["result"].get("orbits")
        if orbits:
            out.writerow(["summary", "orbit_count", orbits["orbit_count"]])
            for row in orbits["histogram"]:
                out.writerow(["histogram", row["length"], row["count"]])
        return buf.getvalue().rstrip("\n")
    lines = [f"{doc['command']} " + " ".join(f"{k}={v}" for k, v in sorted(doc["params"].items()))]
    for c in doc["checks"]:
        lines.append(f"{c['label']} {'PASS' if c['ok'] else 'FAIL'} {c['name']}")
    orbits = doc["result"].get("orbits")
    if orbits:
        lines.append(f"orbits: {orbits['orbit_count']}")
        lines.append("histogram: " + ", ".join(f"{r['length']}x{r['count']}"
                                              for r in orbits["histogram"]))
    for key in ("components", "routes"):
        if key in doc["result"]:
            lines.append(f"{key}: {doc['result'][key]}")
    return "\n".join(lines)


def _cache_path(cfg: RunConfig) -> Path | None:
    if not cfg.cache_dir:
        return None
    return Path(cfg.cache_dir) / f"{cfg.command}-{cfg.cache_key()}.json"


def run(cfg: RunConfig) -> dict:
    """Produce the report document for ``cfg``, through the cache when one is set."""
    path = _cache_path(cfg)
    if path is not None and path.exists() and not cfg.dump_diagram:
        return json.loads(path.read_text())
    doc = COMMANDS[cfg.command](cfg).to_dict()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True))
        tmp.replace(path)
    return doc


# ---------------------------------------------------------------------------
# argument parsing

def parse_bytes(text: str) -> int:
    units = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}
    t = text.strip().upper().removesuffix("B")
    try:
        if t and t[-1] in units:
            return int(float(t[:-1]) * units[t[-1]])
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad byte count {text!r}") from None


def parse_perm(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad permutation {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--engine", choices=ENGINES, default="bfs")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--memory-cap", type=parse_bytes, default=None,
                        help="refuse runs needing more than this many bytes (e.g. 512M)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                        help=f"report cache directory (default: ${CACHE_ENV})")
    common.add_argument("--dump-diagram", metavar="PATH", default=None,
                        help="write the wiring diagram as JSON to PATH")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock times (output is then not reproducible)")

    parser = argparse.ArgumentParser(prog="schubflip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("components", parents=[common], help="count components for rank n")
    p.add_argument("--n", type=int, required=True)
    p = sub.add_parser("orbits", parents=[common], help="orbits of the flip group on size-k matrices")
    p.add_argument("--k", type=int, required=True)
    p = sub.add_parser("general", parents=[common], help="flip orbits for a permutation")
    p.add_argument("--w", type=parse_perm, required=True, help="one-line notation, e.g. 4,3,2,1")
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    return RunConfig(
        command=args.command, n=getattr(args, "n", None), k=getattr(args, "k", None),
        w=getattr(args, "w", None), suite=getattr(args, "suite", None), engine=args.engine,
        threads=args.threads, memory_cap=args.memory_cap, seed=args.seed, trials=args.trials,
        timings=args.timings, output_format=args.format, cache_dir=args.cache_dir,
        dump_diagram=args.dump_diagram)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        doc = run(cfg)
    except (UsageError, ResourceError, ValueError) as exc:
        print(f"schubflip: error: {exc}", file=sys.stderr)
        if isinstance(exc, ResourceError):
            print("hint: lower --n/--k, use --engine bfs, or raise --memory-cap", file=sys.stderr)
        return 2
    print(render(doc, cfg.output_format))
    return exit_status(doc)


if __name__ == "__main__":
    sys.exit(main())
