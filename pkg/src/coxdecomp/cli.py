"""Command-line interface: ``coxdecomp <command> [inputs...]``.

Coxeter systems are read from ``.cox`` files (rank on line 1, then the
symmetric label matrix, ``inf`` allowed) or from the JSON the tool emits.
Groups are read as Cayley tables (order on line 1, then 0-based rows).
Exit codes: 0 success, 2 parse/validation error, 3 budget exceeded,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coxeter, decomp, liealg
from .errors import BudgetExceeded, ConsistencyError, CoxDecompError, ParseError, ValidationError
from .exact import DEFAULT_PRECISION_BITS, INF, signature
from .grouptheory import cayley, invariants, remak

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_CONSISTENCY = 0, 2, 3, 4

# environment overrides mirror the budget flags
ENV_BUDGETS = {
    "closure": "COXDECOMP_CLOSURE_BUDGET",
    "precision_bits": "COXDECOMP_PRECISION_BITS",
    "order_bound": "COXDECOMP_ORDER_BOUND",
    "seconds": "COXDECOMP_TIME_LIMIT",
}


@dataclass(frozen=True)
class Budgets:
    closure: int = coxeter.DEFAULT_CLOSURE_BUDGET
    precision_bits: int = DEFAULT_PRECISION_BITS
    order_bound: int = coxeter.DEFAULT_TABLE_BOUND
    seconds: float = 0.0  # 0 means no wall-time limit

    def __post_init__(self):
        for name in ("closure", "precision_bits", "order_bound"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"budget {name} must be positive")
        if self.seconds < 0:
            raise ValidationError("budget seconds must be nonnegative")


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    format: str = "json"
    budgets: Budgets = field(default_factory=Budgets)
    jobs: int = 1
    options: tuple[tuple[str, object], ...] = ()

    def option(self, name, default=None):
        return dict(self.options).get(name, default)


# ---------------------------------------------------------------------------
# parsers
# ---------------------------------------------------------------------------


def _tokens(line: str):
    """(column, token) pairs, columns 1-based."""
    col, out = 0, []
    for tok in line.split():
        col = line.index(tok, col)
        out.append((col + 1, tok))
        col += len(tok)
    return out


def _int_token(tok: str, line: int, col: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", line, col) from None


def _content_lines(text: str):
    """Numbered non-blank lines, with ``#`` comments stripped."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield no, line


def parse_coxeter_text(text: str) -> coxeter.CoxeterSystem:
    if text.lstrip().startswith("{"):
        try:
            return coxeter.CoxeterSystem.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed Coxeter system JSON: {exc}") from None
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty input", 1, 1)
    no, first = lines[0]
    head = _tokens(first)
    if len(head) != 1:
        raise ParseError("line 1 must hold the rank only", no, head[1][0] if len(head) > 1 else 1)
    n = _int_token(head[0][1], no, head[0][0], "the rank")
    if n < 1:
        raise ParseError("rank must be positive", no, head[0][0])
    if len(lines) - 1 != n:
        where = lines[n + 1][0] if len(lines) > n + 1 else lines[-1][0] + 1
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}", where, 1)
    m = [[0] * n for _ in range(n)]
    pos = [[(0, 0)] * n for _ in range(n)]
    for i, (no, line) in enumerate(lines[1:]):
        toks = _tokens(line)
        if len(toks) != n:
            col = toks[n][0] if len(toks) > n else len(line.rstrip()) + 1
            raise ParseError(f"expected {n} entries, found {len(toks)}", no, col)
        for j, (col, tok) in enumerate(toks):
            pos[i][j] = (no, col)
            if tok.lower() in ("inf", "infinity", "oo"):
                m[i][j] = INF
                continue
            v = _int_token(tok, no, col, "a positive integer or 'inf'")
            if v < 1:
                raise ParseError(f"label {v} is not a positive integer", no, col)
            m[i][j] = v
    for i in range(n):
        if m[i][i] != 1:
            raise ParseError(f"diagonal entry ({i},{i}) must be 1", *pos[i][i])
        for j in range(n):
            if i != j and m[i][j] == 1:
                raise ParseError(f"off-diagonal entry ({i},{j}) must be at least 2", *pos[i][j])
            if m[i][j] != m[j][i]:
                raise ParseError(f"matrix is not symmetric: entry ({i},{j}) differs from ({j},{i})",
                                 *pos[max(i, j)][min(i, j)])
    return coxeter.CoxeterSystem(m)


def parse_coxeter_file(path) -> coxeter.CoxeterSystem:
    return parse_coxeter_text(_read(path))


def parse_cayley_text(text: str) -> cayley.CayleyGroup:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty input", 1, 1)
    no, first = lines[0]
    head = _tokens(first)
    if len(head) != 1:
        raise ParseError("line 1 must hold the group order only", no, 1)
    n = _int_token(head[0][1], no, head[0][0], "the group order")
    if n < 1:
        raise ParseError("group order must be positive", no, head[0][0])
    if len(lines) - 1 != n:
        where = lines[n + 1][0] if len(lines) > n + 1 else lines[-1][0] + 1
        raise ParseError(f"expected {n} table rows, found {len(lines) - 1}", where, 1)
    table = np.zeros((n, n), dtype=np.int64)
    for i, (no, line) in enumerate(lines[1:]):
        toks = _tokens(line)
        if len(toks) != n:
            col = toks[n][0] if len(toks) > n else len(line.rstrip()) + 1
            raise ParseError(f"expected {n} entries, found {len(toks)}", no, col)
        for j, (col, tok) in enumerate(toks):
            v = _int_token(tok, no, col, "an element index")
            if not 0 <= v < n:
                raise ParseError(f"closure fails: index {v} outside 0..{n - 1}", no, col)
            table[i, j] = v
    return cayley.CayleyGroup(table)


def parse_cayley_file(path) -> cayley.CayleyGroup:
    return parse_cayley_text(_read(path))


def format_cayley(G: cayley.CayleyGroup) -> str:
    rows = [str(G.order)] + [" ".join(str(int(x)) for x in row) for row in G.table]
    return "\n".join(rows) + "\n"


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# commands; each returns a JSON-ready payload
# ---------------------------------------------------------------------------


def _subgroup_json(H: cayley.Subgroup) -> dict:
    return {"order": H.order, "members": [int(x) for x in H.members_array]}


def cmd_signature(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    sig = signature(coxeter.tits_form(cs), cfg.budgets.precision_bits)
    return {"rank": cs.n, "signature": sig.as_list()}


def cmd_classify(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    comps = [coxeter.classify(sub, cfg.budgets.precision_bits) for _, sub in coxeter.components(cs)]
    sig = signature(coxeter.tits_form(cs), cfg.budgets.precision_bits)
    if len(comps) == 1:
        kind, type_name = comps[0].kind, comps[0].type_name
    else:
        # a reducible system is finite iff every component is
        kind = coxeter.FINITE if all(c.kind == coxeter.FINITE for c in comps) else "Infinite"
        type_name = None
    return {"kind": kind, "signature": sig.as_list(), "type": type_name,
            "components": [c.to_json() for c in comps]}


def cmd_components(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    return {"components": [
        {"generators": list(idx), "label": coxeter.graph_label(sub), "system": sub.to_json()}
        for idx, sub in coxeter.components(cs)
    ]}


def cmd_decompose(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    fac = decomp.decompose(cs, oracle_bound=cfg.budgets.order_bound, budget_bits=cfg.budgets.precision_bits)
    out = fac.to_json()
    out["order"] = fac.order() if fac.is_finite else "infinite"
    return out


def cmd_cross_validate(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    rng = np.random.default_rng(cfg.option("seed", 0))
    res = decomp.cross_validate(cs, budget=cfg.budgets.closure, bound=cfg.budgets.order_bound, rng=rng)
    return res.to_json()


def cmd_build_group(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    W = coxeter.build_group(cs, budget=cfg.budgets.closure, budget_bits=cfg.budgets.precision_bits)
    longest = W.word(W.order - 1)
    out = {"order": W.order, "rank": W.rank, "conductor": W.conductor,
           "longest_element_length": len(longest)}
    target = cfg.option("cayley_out")
    if target:
        Path(target).write_text(format_cayley(W.cayley_group(cfg.budgets.order_bound)))
        out["cayley_table"] = str(target)
    return out


def cmd_remak(cfg: RunConfig, path):
    G = parse_cayley_file(path)
    rng = np.random.default_rng(cfg.option("seed", 0))
    res = remak.remak_decompose(G, rng=rng, bound=cfg.budgets.order_bound)
    return {
        "order": G.order,
        "factors": [
            {"label": str(lbl), "order": F.order, "members": [int(x) for x in F.members_array]}
            for lbl, F in zip(res.labels, res.factors)
        ],
    }


def cmd_center(cfg: RunConfig, path):
    return _subgroup_json(cayley.center(parse_cayley_file(path)))


def cmd_hypercenter(cfg: RunConfig, path):
    G = parse_cayley_file(path)
    out = _subgroup_json(cayley.hypercenter(G))
    out["upper_central_series"] = [H.order for H in cayley.upper_central_series(G)]
    return out


def cmd_kn(cfg: RunConfig, path):
    G = parse_cayley_file(path)
    n = cfg.option("n")
    K, k = invariants.kn(G, n, bound=cfg.budgets.order_bound)
    return {"n": n, "k": k, "kernel": _subgroup_json(K)}


def cmd_kn_free(cfg: RunConfig, _path):
    spec = invariants.FreeGroupSpec(cfg.option("g"), cfg.option("n"))
    return {"g": spec.g, "n": spec.n, "k": invariants.kn_free(spec, budget=cfg.budgets.closure)}


def cmd_qm_bound(cfg: RunConfig, path):
    G = parse_cayley_file(path)
    return {"order": G.order, "qm_bound": invariants.qm_bound(G, bound=cfg.budgets.order_bound)}


def _lie_input(cfg: RunConfig, path) -> liealg.LieAlgebra:
    if path is not None:
        try:
            return liealg.LieAlgebra.from_json(json.loads(_read(path)))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"malformed Lie algebra JSON: {exc}") from None
    sig = cfg.option("sig")
    if sig is None:
        raise ValidationError("give a Lie algebra JSON file or --p/--q/--r")
    return liealg.of_algebra(sig)


def cmd_lie_of(cfg: RunConfig, _path):
    L = liealg.of_algebra(cfg.option("sig"))
    return L.to_json()


def cmd_lie_decompose(cfg: RunConfig, path):
    return liealg.verdict_to_json(liealg.decompose_ideals(_lie_input(cfg, path)))


def cmd_graph(cfg: RunConfig, path):
    cs = parse_coxeter_file(path)
    if cfg.format == "dot":
        return coxeter.to_dot(cs)
    perm, canon = coxeter.canonical_form(cs)
    return {"label": coxeter.graph_label(cs), "system": cs.to_json(),
            "canonical": {"order": list(perm), "system": canon.to_json()}}


COMMANDS = {
    "signature": (cmd_signature, "cox"),
    "classify": (cmd_classify, "cox"),
    "components": (cmd_components, "cox"),
    "decompose": (cmd_decompose, "cox"),
    "cross-validate": (cmd_cross_validate, "cox"),
    "build-group": (cmd_build_group, "cox"),
    "remak": (cmd_remak, "cayley"),
    "center": (cmd_center, "cayley"),
    "hypercenter": (cmd_hypercenter, "cayley"),
    "kn": (cmd_kn, "cayley"),
    "kn-free": (cmd_kn_free, None),
    "qm-bound": (cmd_qm_bound, "cayley"),
    "lie-of": (cmd_lie_of, None),
    "lie-decompose": (cmd_lie_decompose, "lie"),
    "graph": (cmd_graph, "cox"),
}


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ValidationError):
        return EXIT_INVALID
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, ConsistencyError):
        return EXIT_CONSISTENCY
    raise exc


@contextmanager
def _wall_clock(seconds: float):
    if seconds <= 0 or not hasattr(signal, "SIGALRM"):
        yield
        return

    def on_alarm(signum, frame):
        raise BudgetExceeded(f"wall-time budget of {seconds} s exceeded", {"seconds": seconds})

    old = signal.signal(signal.SIGALRM, on_alarm)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def run_one(cfg: RunConfig, path) -> tuple[int, object]:
    """Run the command on one input; returns (exit code, payload or error record)."""
    fn, _ = COMMANDS[cfg.command]
    try:
        with _wall_clock(cfg.budgets.seconds):
            return EXIT_OK, fn(cfg, path)
    except CoxDecompError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError) and exc.line is not None:
            record["line"], record["column"] = exc.line, exc.column
        if isinstance(exc, BudgetExceeded) and exc.partial:
            record["partial"] = exc.partial
        return exit_code_for(exc), record


def _run_star(args):
    return run_one(*args)


def run(cfg: RunConfig, out=None) -> int:
    """Run a configuration, print the report, and return the exit code.

    Several inputs form a corpus: jobs run in parallel when ``cfg.jobs > 1``
    and results are reported in input order.
    """
    out = out or sys.stdout
    if cfg.command not in COMMANDS:
        raise ValidationError(f"unknown command {cfg.command!r}")
    if cfg.format == "dot" and cfg.command != "graph":
        raise ValidationError("--format dot is only available for graph")
    inputs = list(cfg.inputs) or [None]
    if len(inputs) == 1:
        results = [run_one(cfg, inputs[0])]
    elif cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_star, [(cfg, p) for p in inputs]))
    else:
        results = [run_one(cfg, p) for p in inputs]
    code = max(c for c, _ in results)
    for p, (c, r) in zip(inputs, results):
        if c:
            print(f"error: {p + ': ' if p else ''}{r['message']}", file=sys.stderr)
    if len(inputs) == 1:
        payload = results[0][1]
    else:
        payload = [{"input": p, "exit": c, "result": r} for p, (c, r) in zip(inputs, results)]
    out.write(render(payload, cfg.format))
    return code


def render(payload, fmt: str) -> str:
    if isinstance(payload, str):
        return payload
    if fmt == "text":
        return _text(payload) + "\n"
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        items = []
        for v in obj:
            if isinstance(v, (dict, list)):
                body = _text(v, indent + 1)
                # mark where each item starts
                items.append(f"{pad}- " + body[len(pad) + 2:])
            else:
                items.append(f"{pad}{_scalar(v)}")
        return "\n".join(items)
    return pad + _scalar(obj)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return " ".join(_scalar(x) for x in v)
    if v is None:
        return "-"
    return str(v)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _env_budgets() -> dict:
    vals = {}
    for name, var in ENV_BUDGETS.items():
        raw = os.environ.get(var)
        if raw is None:
            continue
        try:
            vals[name] = float(raw) if name == "seconds" else int(raw)
        except ValueError:
            raise ValidationError(f"environment variable {var} must be a number, got {raw!r}") from None
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coxdecomp",
                                     description="Direct-product decompositions of Coxeter groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text", "dot"], default="json")
    common.add_argument("--closure-budget", type=int, help="max group elements enumerated")
    common.add_argument("--precision-bits", type=int, help="max interval precision for sign decisions")
    common.add_argument("--order-bound", type=int, help="max group order for table-based oracles")
    common.add_argument("--time-limit", type=float, help="wall-time budget per input in seconds")
    common.add_argument("--jobs", type=int, default=int(os.environ.get("COXDECOMP_JOBS", "1")),
                        help="parallel workers for several inputs")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized search orders")
    for name, (_, kind) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        if kind in ("cox", "cayley"):
            p.add_argument("inputs", nargs="+", help=f"{kind} input files")
        elif kind == "lie":
            p.add_argument("inputs", nargs="*", help="Lie algebra JSON files")
        if name in ("kn", "kn-free"):
            p.add_argument("--n", type=int, required=True)
        if name == "kn-free":
            p.add_argument("--g", type=int, required=True)
        if name in ("lie-of", "lie-decompose"):
            for letter in "pqr":
                p.add_argument(f"--{letter}", type=int, default=None if name == "lie-decompose" else 0)
        if name == "build-group":
            p.add_argument("--cayley-out", help="write the Cayley table of W to this file")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    vals = _env_budgets()
    for name, flag in (("closure", "closure_budget"), ("precision_bits", "precision_bits"),
                       ("order_bound", "order_bound"), ("seconds", "time_limit")):
        if getattr(args, flag) is not None:
            vals[name] = getattr(args, flag)
    options = {"seed": args.seed}
    for key in ("n", "g", "cayley_out"):
        if getattr(args, key, None) is not None:
            options[key] = getattr(args, key)
    if hasattr(args, "p"):
        sig = (args.p, args.q, args.r)
        if all(v is None for v in sig):
            sig = None
        else:
            sig = liealg.OfSignature(*(v or 0 for v in sig))
        options["sig"] = sig
    if args.jobs < 1:
        raise ValidationError("--jobs must be at least 1")
    return RunConfig(args.command, tuple(getattr(args, "inputs", ()) or ()), args.format,
                     Budgets(**vals), args.jobs, tuple(sorted(options.items())))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())


__all__ = [
    "Budgets",
    "COMMANDS",
    "RunConfig",
    "build_parser",
    "format_cayley",
    "main",
    "parse_cayley_file",
    "parse_cayley_text",
    "parse_coxeter_file",
    "parse_coxeter_text",
    "render",
    "run",
    "run_one",
]
