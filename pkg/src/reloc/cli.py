"""Command-line front end: instance files, solving, benchmarks.

Instance file grammar (LF line endings, ASCII decimal ids, '#' comments):

    variant <mapf|tswap|trot|tperm>
    vertices <n>
    e <u> <v>          # one per edge
    a <id> <start> <goal>   # one per item, ids 0..k-1

Exit codes: 0 solved / usage ok, 2 usage or input error, 3 timeout or
resource limit, 4 unsolvable.
"""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
import tempfile

from . import bench
from .cbs import cbs_solve
from .graphs import build_graph, make_clique, make_grid, make_random, make_star
from .oracle import oracle_solve
from .relocation import Instance, Variant, validate
from .satcore import to_dimacs
from .solvers import mdd_sat_solve, smt_cbs_solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_UNSOLVABLE = 4


class InstanceFormatError(ValueError):
    pass


def parse_instance(text: str) -> Instance:
    """Parse the instance grammar; errors carry 1-based line numbers."""
    variant = None
    n = None
    edges = []
    items = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        def bad(msg):
            raise InstanceFormatError(f"line {lineno}: {msg}")
        if parts[0] == "variant":
            if variant is not None:
                bad("duplicate variant line")
            if len(parts) != 2:
                bad("expected 'variant <name>'")
            try:
                variant = Variant(parts[1])
            except ValueError:
                bad(f"unknown variant {parts[1]!r}")
        elif parts[0] == "vertices":
            if n is not None:
                bad("duplicate vertices line")
            if len(parts) != 2 or not parts[1].isdigit():
                bad("expected 'vertices <n>'")
            n = int(parts[1])
        elif parts[0] == "e":
            if len(parts) != 3 or not all(p.isdigit() for p in parts[1:]):
                bad("expected 'e <u> <v>'")
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "a":
            if len(parts) != 4 or not all(p.isdigit() for p in parts[1:]):
                bad("expected 'a <id> <start> <goal>'")
            item = int(parts[1])
            if item in items:
                bad(f"duplicate item id {item}")
            items[item] = (int(parts[2]), int(parts[3]))
        else:
            bad(f"unknown directive {parts[0]!r}")
    if variant is None:
        raise InstanceFormatError("missing 'variant' line")
    if n is None:
        raise InstanceFormatError("missing 'vertices' line")
    if not items:
        raise InstanceFormatError("no 'a' item lines")
    if sorted(items) != list(range(len(items))):
        raise InstanceFormatError("item ids must be exactly 0..k-1")
    try:
        graph = build_graph(n, edges)
        starts = tuple(items[i][0] for i in range(len(items)))
        goals = tuple(items[i][1] for i in range(len(items)))
        return Instance(graph, variant, starts, goals)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def serialize_instance(inst: Instance) -> str:
    lines = [f"variant {inst.variant.value}", f"vertices {inst.graph.n}"]
    for u, v in sorted(inst.graph.edges):
        lines.append(f"e {u} {v}")
    for i, (s, g) in enumerate(zip(inst.starts, inst.goals)):
        lines.append(f"a {i} {s} {g}")
    return "\n".join(lines) + "\n"


def make_dimacs_backend(command: str):
    """SAT backend running an external DIMACS solver.

    The command receives the CNF file path as its last argument and must
    print SATISFIABLE/UNSATISFIABLE (with or without the 's ' prefix) and,
    when satisfiable, the model as 'v' lines or bare literal lines.
    """
    argv = shlex.split(command)
    if not argv:
        raise ValueError("empty external solver command")

    def backend(formula, timeout):
        fd, path = tempfile.mkstemp(suffix=".cnf", text=True)
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(to_dimacs(formula))
            try:
                proc = subprocess.run(
                    argv + [path], capture_output=True, text=True,
                    timeout=timeout,
                )
            except subprocess.TimeoutExpired:
                return "TIMEOUT"
            except OSError as exc:
                raise RuntimeError(
                    f"failed to launch external solver {argv[0]!r}: {exc}"
                ) from exc
            return _parse_solver_output(proc.stdout, formula.num_vars)
        finally:
            os.unlink(path)

    return backend


def _parse_solver_output(text: str, num_vars: int):
    status = None
    lits = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("s "):
            line = line[2:].strip()
        if line in ("SATISFIABLE", "SAT"):
            status = "SAT"
            continue
        if line in ("UNSATISFIABLE", "UNSAT"):
            return "UNSAT"
        if line.startswith("v "):
            line = line[2:]
        try:
            lits.extend(int(tok) for tok in line.split())
        except ValueError:
            continue  # banner or timing line
    if status != "SAT":
        raise RuntimeError("external solver printed no recognizable status")
    model = {v: False for v in range(1, num_vars + 1)}
    for lit in lits:
        if lit == 0:
            continue
        if abs(lit) <= num_vars:
            model[abs(lit)] = lit > 0
    return model


def _cmd_generate(args) -> int:
    try:
        if args.family == "grid":
            if "x" in args.size:
                w, h = (int(p) for p in args.size.split("x", 1))
            else:
                w = h = int(args.size)
            g = make_grid(w, h)
        elif args.family == "random":
            g = make_random(int(args.size), args.extra, args.seed)
        elif args.family == "star":
            g = make_star(int(args.size))
        else:
            g = make_clique(int(args.size))
        variant = Variant(args.variant)
        if args.permutation:
            from .relocation import random_permutation_instance
            inst = random_permutation_instance(g, variant, args.items, args.seed)
        else:
            from .relocation import random_instance
            inst = random_instance(g, variant, args.items, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = serialize_instance(inst)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def _print_plan(plan) -> None:
    for t in range(plan.makespan + 1):
        cfg = " ".join(str(p[t]) for p in plan.paths)
        print(f"{t}: {cfg}")
    print(f"xi = {plan.cost}")


def _cmd_solve(args) -> int:
    try:
        with open(args.infile) as fh:
            inst = parse_instance(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceFormatError as exc:
        print(f"error: {args.infile}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    backend = None
    if args.sat != "internal":
        if not args.sat.startswith("dimacs:"):
            print("error: --sat must be 'internal' or 'dimacs:CMD'", file=sys.stderr)
            return EXIT_USAGE
        try:
            backend = make_dimacs_backend(args.sat[len("dimacs:"):])
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE

    if args.algo == "oracle":
        try:
            res = oracle_solve(inst)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        status, xi, plan = res.status, res.xi, res.plan
        row = bench.MetricsRow(
            os.path.basename(args.infile), "file", inst.variant.value,
            "oracle", inst.graph.n, inst.k, 0, status == "solved", status,
            xi, plan.makespan if plan else None, 0.0, 0.0, 0, 0, 0, 0, 0,
        )
    else:
        if args.algo == "cbs":
            res = cbs_solve(inst, timeout=args.timeout)
        elif args.algo == "mddsat":
            res = mdd_sat_solve(inst, timeout=args.timeout, sat=backend)
        else:
            res = smt_cbs_solve(inst, timeout=args.timeout, sat=backend)
        status, xi, plan = res.status, res.xi, res.plan
        s = res.stats
        row = bench.MetricsRow(
            os.path.basename(args.infile), "file", inst.variant.value,
            args.algo, inst.graph.n, inst.k, 0, status == "solved", status,
            xi, s.mu, s.runtime * 1000.0, s.sat_time * 1000.0,
            s.sat_calls, s.clauses, s.variables, s.refinements, s.ct_nodes,
        )

    if args.stats:
        new = not os.path.exists(args.stats) or os.path.getsize(args.stats) == 0
        with open(args.stats, "a") as fh:
            if new:
                fh.write(bench.rows_to_csv([row]))
            else:
                fh.write(bench.rows_to_csv([row]).split("\n", 1)[1])

    if status == "solved":
        if validate(inst, plan):
            raise RuntimeError("solver returned an invalid plan")
        _print_plan(plan)
        return EXIT_OK
    if status in ("timeout", "limit"):
        print(f"{status}: no answer within the configured budget", file=sys.stderr)
        return EXIT_TIMEOUT
    print("unsolvable", file=sys.stderr)
    return EXIT_UNSOLVABLE


def _cmd_bench(args) -> int:
    algos = tuple(args.algos.split(","))
    for a in algos:
        if a not in ("cbs", "mddsat", "smtcbs", "oracle"):
            print(f"error: unknown algorithm {a!r}", file=sys.stderr)
            return EXIT_USAGE
    def progress(row):
        if args.verbose:
            print(f"  {row.instance_id} {row.algorithm}: {row.status}"
                  f" xi={row.xi} {row.runtime_ms:.0f}ms", file=sys.stderr)
    try:
        rows = bench.run_suite(args.suite, seeds=args.seeds,
                               timeout=args.timeout, algorithms=algos,
                               progress=progress)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(args.out, "w") as fh:
        fh.write(bench.rows_to_csv(rows))
    cells = bench.summarize(rows)
    root, ext = os.path.splitext(args.out)
    summary_path = f"{root}.summary{ext or '.csv'}"
    with open(summary_path, "w") as fh:
        fh.write(bench.summary_to_csv(cells))
    print(bench.summary_table(cells))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="reloc",
        description="Optimal item relocation on graphs (MAPF/TSWAP/TROT/TPERM).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--family", required=True,
                   choices=("grid", "random", "star", "clique"))
    g.add_argument("--size", required=True,
                   help="vertex count, or WxH for grids (e.g. 8x8)")
    g.add_argument("--variant", required=True,
                   choices=[v.value for v in Variant])
    g.add_argument("--items", type=int, required=True, metavar="K")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--extra", type=float, default=0.2,
                   help="extra edge fraction for --family random")
    g.add_argument("--permutation", action="store_true",
                   help="goals permute the start vertices (solvable token instances)")
    g.add_argument("--out", default="-", help="output path, '-' for stdout")
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--algo", required=True,
                   choices=("cbs", "mddsat", "smtcbs", "oracle"))
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--timeout", type=float, default=60.0)
    s.add_argument("--stats", help="append a metrics CSV row to this file")
    s.add_argument("--sat", default="internal",
                   help="'internal' or 'dimacs:CMD' for an external solver")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", default="paper-small",
                   choices=sorted(bench.SUITES))
    b.add_argument("--seeds", type=int, default=10)
    b.add_argument("--timeout", type=float, default=60.0)
    b.add_argument("--algos", default="cbs,mddsat,smtcbs")
    b.add_argument("--out", required=True, help="per-run CSV path")
    b.add_argument("--verbose", action="store_true")
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
