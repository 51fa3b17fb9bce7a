"""Command-line entry point: ``cliquepart <gen|count|solve|verify|export|bench>``.

Each run echoes its fully resolved command line to stderr as ``# config: ...``;
re-running that line reproduces every output byte for byte, apart from
elapsed-time fields.  Exit codes: 0 success, 1 verification failure, 2 usage
error.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
from fractions import Fraction
from functools import partial
from pathlib import Path

from . import export, formulations, instances, solvers, workflows
from .core import (
    EdgeVector,
    edges_to_partition,
    is_clique_partitioning,
    objective_value,
    partition_to_edges,
    repair_to_clique_partitioning,
)
from .formulations import FormulationKind

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _kinds(text: str) -> list[FormulationKind]:
    if text.strip().lower() == "all":
        return list(FormulationKind)
    try:
        return [FormulationKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p.add_argument("--out", default=".", help="output directory (default .)")
    p.add_argument("--format", choices=["csv", "markdown", "json"], default="csv")
    p.add_argument(
        "--jobs", type=int, default=workflows.default_jobs(),
        help="parallel instance tasks (default $CLIQUEPART_JOBS or 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cliquepart", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate instance files")
    p.add_argument("family", choices=instances.GENERATED_FAMILIES)
    p.add_argument("n", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--clusters", type=int, default=5, help="structured: cluster count")
    p.add_argument("--p-in", type=_fraction, default=Fraction(3, 4), help="structured: within-cluster +1 probability")
    p.add_argument("--ba-attach", type=int, default=2, help="modularity: BA attachment parameter")
    _common(p)

    p = sub.add_parser("count", help="constraint counts per formulation")
    p.add_argument("files", nargs="+")
    p.add_argument("--kinds", type=_kinds, default=_kinds("P,MRP,PCP,PFRP"))
    p.add_argument("--expected", action="store_true", help="add analytic expectations (random/sparse)")
    _common(p)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("file")
    p.add_argument("--kind", type=FormulationKind.parse, default=FormulationKind.P)
    p.add_argument("--engine", choices=["vectors", "bnb", "oracle"], default="bnb")
    p.add_argument("--all", action="store_true", help="report every optimum (vectors/oracle)")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float)
    _common(p)

    p = sub.add_parser("verify", help="exhaustive correctness checks on small instances")
    p.add_argument("files", nargs="*")
    p.add_argument(
        "--fuzz", nargs=4, metavar=("FAMILY", "N", "COUNT", "SEED"),
        help="check COUNT generated instances with seeds SEED, SEED+1, ...",
    )
    p.add_argument("--experimental", action="store_true", help="also test the unproven XFRP condition")
    _common(p)

    p = sub.add_parser("export", help="write LP files")
    p.add_argument("file")
    p.add_argument("--kinds", type=_kinds, default=_kinds("P,MRP,PCP,PFRP"))
    _common(p)

    p = sub.add_parser("bench", help="count and solve every instance of a manifest")
    p.add_argument("manifest")
    p.add_argument("--kinds", type=_kinds, default=_kinds("MRP,PCP,PFRP"))
    p.add_argument("--engine", choices=["vectors", "bnb", "oracle"], default="bnb")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float)
    _common(p)
    return parser


POSITIONAL = {
    "gen": ("family", "n"),
    "count": ("files",),
    "solve": ("file",),
    "verify": ("files",),
    "export": ("file",),
    "bench": ("manifest",),
}


def _flag_value(val) -> list[str]:
    if isinstance(val, FormulationKind):
        return [val.value]
    if isinstance(val, list):
        if val and isinstance(val[0], FormulationKind):
            return [",".join(k.value for k in val)]
        return [str(v) for v in val]
    return [str(val)]


def config_line(args: argparse.Namespace) -> str:
    """The resolved command line, every option spelled out."""
    pos = POSITIONAL[args.command]
    parts = ["cliquepart", args.command]
    for key in pos:
        val = getattr(args, key)
        parts += [str(v) for v in val] if isinstance(val, list) else [str(val)]
    for key, val in sorted(vars(args).items()):
        if key == "command" or key in pos or val is None or val is False:
            continue
        flag = "--" + key.replace("_", "-")
        parts += [flag] if val is True else [flag, *_flag_value(val)]
    return shlex.join(parts)


def _read(path: str):
    try:
        return instances.read_instance(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except instances.InstanceParseError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.count < 1:
        raise UsageError("--count must be positive")
    for t in range(args.count):
        seed = args.seed + t
        cfg = instances.GeneratorConfig(
            args.family, args.n, seed, k_clusters=args.clusters,
            p_in=args.p_in, ba_attach=args.ba_attach,
        )
        path = out / f"{args.family}_n{args.n}_s{seed}.cpp"
        instances.write_instance(cfg.generate(), path)
        print(path)
    return EXIT_OK


def cmd_count(args) -> int:
    header = ["instance", "family", "n", "seed"] + [k.value for k in args.kinds]
    if args.expected:
        header += [f"expected_{k.value}" for k in args.kinds]
    rows = []
    for path in args.files:
        inst = _read(path)
        row = [Path(path).name, inst.family, inst.n, inst.seed]
        row += list(workflows.count_row(inst, args.kinds).values())
        if args.expected:
            for k in args.kinds:
                if inst.family in formulations.FAMILY_DISTRIBUTIONS:
                    row.append(str(formulations.expected_count(k, inst.family, inst.n)))
                else:
                    row.append(None)
        rows.append(row)
    sys.stdout.write(export.write_table(header, rows, args.format))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _read(args.file)
    try:
        rep = solvers.solve_formulation(
            inst, args.kind, engine=args.engine, mode="all" if args.all else "one",
            node_limit=args.node_limit, time_limit=args.time_limit,
        )
    except solvers.SizeLimitError as e:
        raise UsageError(str(e)) from None
    sols = []
    for sol in rep.solutions:
        x = sol if isinstance(sol, EdgeVector) else partition_to_edges(sol)
        fixed = repair_to_clique_partitioning(x)
        sols.append({
            "raw_value": objective_value(inst, x),
            "repaired_value": objective_value(inst, fixed),
            "clique_partitioning": is_clique_partitioning(x),
            "blocks": edges_to_partition(fixed).blocks(),
        })
    out = {
        "instance": Path(args.file).name,
        "kind": args.kind.value,
        "engine": args.engine,
        "status": rep.status,
        "objective": rep.optimal_value,
        "value": sols[0]["repaired_value"],
        "explored": rep.explored,
        "solutions": sols,
    }
    if args.kind.experimental:
        out["note"] = formulations.EXPERIMENTAL_NOTE
    if args.format == "json":
        print(json.dumps(out, indent=1))
    else:
        for key, val in out.items():
            if key != "solutions":
                print(f"{key}: {val}")
        for t, s in enumerate(sols):
            print(
                f"solution {t}: raw={s['raw_value']} repaired={s['repaired_value']} "
                f"clique_partitioning={s['clique_partitioning']} blocks={s['blocks']}"
            )
    return EXIT_OK


def _verify_file(path: str, experimental: bool):
    return workflows.verify_instance(instances.read_instance(path), path, experimental)


def _verify_fuzz(item, family: str, n: int, experimental: bool):
    inst = instances.fuzz_instance(family, n, item)
    return workflows.verify_instance(inst, f"{family} n={n} seed={item}", experimental)


def cmd_verify(args) -> int:
    if args.fuzz:
        family, n, count, seed = args.fuzz
        try:
            n, count, seed = int(n), int(count), int(seed)
        except ValueError:
            raise UsageError("--fuzz expects FAMILY N COUNT SEED with integer N, COUNT, SEED") from None
        if family not in instances.GENERATED_FAMILIES:
            raise UsageError(f"unknown family {family!r}")
        if not 3 <= n <= solvers.VECTORS_MAX_N:
            raise UsageError(f"verify supports 3 <= n <= {solvers.VECTORS_MAX_N}, got {n}")
        fn = partial(_verify_fuzz, family=family, n=n, experimental=args.experimental)
        items = list(range(seed, seed + count))
    else:
        if not args.files:
            raise UsageError("give instance files or --fuzz FAMILY N COUNT SEED")
        for path in args.files:
            inst = _read(path)
            if inst.n > solvers.VECTORS_MAX_N:
                raise UsageError(f"{path}: verify supports n <= {solvers.VECTORS_MAX_N}")
        fn = partial(_verify_file, experimental=args.experimental)
        items = list(args.files)
    results = workflows.run_parallel(fn, items, args.jobs)
    passed = 0
    for res in results:
        if res.ok:
            passed += 1
        else:
            for f in res.failures:
                print(f"FAIL {res.name}: {f}")
        if res.conjecture_counterexample:
            print(f"CONJECTURE COUNTEREXAMPLE {res.name} (XFRP, {formulations.EXPERIMENTAL_NOTE}): "
                  f"{res.conjecture_counterexample}")
    print(f"{passed}/{len(results)} pass")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


def cmd_export(args) -> int:
    inst = _read(args.file)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    for kind in args.kinds:
        cs = formulations.build_constraints(inst, kind)
        path = out / f"{stem}__{kind.value}.lp"
        export.write_lp(cs, path)
        print(f"{path} {len(cs)}")
    return EXIT_OK


def read_manifest(path: str) -> list[str]:
    base = Path(path).parent
    files = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            p = Path(line)
            if not p.is_absolute() and not p.exists():
                p = base / p
            files.append(str(p))
    return files


def _bench_one(path: str, kinds, engine, node_limit, time_limit):
    inst = instances.read_instance(path)
    return workflows.bench_rows(inst, Path(path).name, kinds, engine, node_limit, time_limit)


def cmd_bench(args) -> int:
    try:
        files = read_manifest(args.manifest)
    except OSError as e:
        raise UsageError(f"cannot read manifest {args.manifest}: {e.strerror}") from None
    for path in files:
        inst = _read(path)
        cap = {"vectors": solvers.VECTORS_MAX_N, "oracle": solvers.ORACLE_MAX_N}.get(args.engine)
        if cap is not None and inst.n > cap:
            raise UsageError(f"{path}: engine {args.engine} supports n <= {cap}, got n={inst.n}")
    fn = partial(
        _bench_one, kinds=args.kinds, engine=args.engine,
        node_limit=args.node_limit, time_limit=args.time_limit,
    )
    rows = [r for chunk in workflows.run_parallel(fn, files, args.jobs) for r in chunk]
    export.write_report(rows, args.format, sys.stdout)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "count": cmd_count,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "export": cmd_export,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    print("# config: " + config_line(args), file=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as e:
        print(f"cliquepart {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
