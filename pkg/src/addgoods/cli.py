"""Command line interface and JSON formats for instances, verdicts and graphs.

Exit codes: ``solve``/``oracle`` return 0 for feasible, 1 for infeasible and 2
for errors; ``check`` returns 0 when the verdict is confirmed.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .bounded import MODES, dispatch, route
from .model import (
    INF,
    Extension,
    Instance,
    InstanceError,
    PoolItem,
    Verdict,
    envy_graph,
    is_envy_free,
    is_inf,
    sum_finite_supplies,
    validate_extension,
)
from .oracle_gen import (
    DEFAULT_CAP,
    BinPackingInput,
    SimpleGraph,
    TooLarge,
    gen_binpacking,
    gen_clique,
    gen_indset,
    gen_random,
    oracle_bounded,
)
from .unbounded import verify_witness

INSTANCE_KEYS = ("agents", "initial_items", "pool_items", "initial_allocation", "budget")


class FormatError(ValueError):
    pass


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise FormatError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _load_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"input is not valid UTF-8: {e}") from None
    try:
        return json.loads(data, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _count(x, where):
    if x == "inf":
        return INF
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise FormatError(f"{where}: expected a nonnegative integer or \"inf\", got {x!r}")
    return x


def _value_map(obj, where):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object of agent -> integer")
    for a, v in obj.items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise FormatError(f"{where}.{a}: expected a nonnegative integer, got {v!r}")
    return dict(obj)


def instance_from_json(doc) -> Instance:
    if not isinstance(doc, dict):
        raise FormatError("instance document must be a JSON object")
    unknown = set(doc) - set(INSTANCE_KEYS)
    if unknown:
        raise FormatError(f"unknown keys: {sorted(unknown)}")
    missing = [k for k in INSTANCE_KEYS if k not in doc]
    if missing:
        raise FormatError(f"missing keys: {missing}")
    agents = doc["agents"]
    if not isinstance(agents, list) or not all(isinstance(a, str) for a in agents):
        raise FormatError("agents: expected an array of strings")
    if not agents:
        raise FormatError("no agents")
    if len(set(agents)) != len(agents):
        raise FormatError("agents: duplicate agent ids")
    if not isinstance(doc["initial_items"], dict):
        raise FormatError("initial_items: expected an object")
    initial = {i: _value_map(v, f"initial_items.{i}") for i, v in doc["initial_items"].items()}
    if not isinstance(doc["pool_items"], dict):
        raise FormatError("pool_items: expected an object")
    pool = {}
    for i, spec in doc["pool_items"].items():
        if not isinstance(spec, dict) or set(spec) - {"supply", "values"} or "supply" not in spec:
            raise FormatError(f"pool_items.{i}: expected {{\"supply\": ..., \"values\": {{...}}}}")
        pool[i] = PoolItem(_count(spec["supply"], f"pool_items.{i}.supply"), _value_map(spec.get("values", {}), f"pool_items.{i}.values"))
    alloc = doc["initial_allocation"]
    if not isinstance(alloc, dict):
        raise FormatError("initial_allocation: expected an object")
    for a, bundle in alloc.items():
        if not isinstance(bundle, list) or not all(isinstance(x, str) for x in bundle):
            raise FormatError(f"initial_allocation.{a}: expected an array of item ids")
        if len(set(bundle)) != len(bundle):
            raise FormatError(f"initial_allocation.{a}: duplicate item ids")
    budget = _count(doc["budget"], "budget")
    try:
        return Instance(tuple(agents), initial, pool, alloc, budget)
    except InstanceError as e:
        raise FormatError(str(e)) from None


def parse_instance(data: bytes | str) -> Instance:
    return instance_from_json(_load_json(data))


def _enc_count(x):
    return "inf" if is_inf(x) else x


def instance_to_json(inst: Instance) -> dict:
    return {
        "agents": list(inst.agents),
        "initial_items": {i: dict(v) for i, v in inst.initial_items.items()},
        "pool_items": {
            i: {"supply": _enc_count(p.supply), "values": dict(p.values)} for i, p in inst.pool_items.items()
        },
        "initial_allocation": {a: sorted(b) for a, b in inst.initial_allocation.items()},
        "budget": _enc_count(inst.budget),
    }


def serialize_instance(inst: Instance) -> bytes:
    return (json.dumps(instance_to_json(inst), indent=2) + "\n").encode("utf-8")


def verdict_to_json(v: Verdict) -> dict:
    ext = v.extension or Extension()
    return {
        "feasible": v.feasible,
        "extension": {a: {i: str(n) for i, n in row.items()} for a, row in ext.counts.items()},
        "size": str(ext.size),
        "witness": v.witness,
        "mode": v.mode,
    }


def serialize_verdict(v: Verdict) -> bytes:
    return (json.dumps(verdict_to_json(v), indent=2) + "\n").encode("utf-8")


def parse_verdict(data: bytes | str) -> Verdict:
    doc = _load_json(data)
    if not isinstance(doc, dict) or not {"feasible", "extension", "size"} <= set(doc):
        raise FormatError("verdict document needs 'feasible', 'extension' and 'size'")
    if set(doc) - {"feasible", "extension", "size", "witness", "mode"}:
        raise FormatError(f"unknown keys: {sorted(set(doc) - {'feasible', 'extension', 'size', 'witness', 'mode'})}")
    counts = {}
    for a, row in doc["extension"].items():
        counts[a] = {}
        for i, n in row.items():
            if not isinstance(n, str) or not n.isdigit():
                raise FormatError(f"extension.{a}.{i}: counts must be decimal strings")
            counts[a][i] = int(n)
    ext = Extension(counts)
    if not isinstance(doc["size"], str) or not doc["size"].isdigit() or int(doc["size"]) != ext.size:
        raise FormatError("size must be a decimal string equal to the sum of counts")
    return Verdict(bool(doc["feasible"]), ext, doc.get("witness"), doc.get("mode", ""))


# -- commands --------------------------------------------------------------


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def _write(path: str | None, data: bytes):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as f:
            f.write(data)


def check_verdict(inst: Instance, v: Verdict, cap: int = DEFAULT_CAP) -> tuple[bool, str]:
    """Recheck a verdict against its instance; returns (ok, message)."""
    if v.feasible:
        problems = validate_extension(inst, v.extension)
        if problems:
            return False, "; ".join(problems)
        if not is_envy_free(inst, v.extension):
            edges = envy_graph(inst, v.extension).sorted_edges()
            return False, f"extension leaves envy: {edges[:5]}"
        return True, "extension is valid and envy-free"
    w = v.witness or {}
    if w.get("kind") in ("zero-class-envy", "negative-cycle"):
        ok = verify_witness(inst, w)
        return ok, "witness confirmed" if ok else "witness does not verify"
    k = inst.budget if not is_inf(inst.budget) else sum_finite_supplies(inst)
    if is_inf(k):
        return False, "witness is not independently checkable"
    try:
        again = oracle_bounded(inst, k, cap)
    except TooLarge:
        return False, "witness is not independently checkable (oracle cap exceeded)"
    if again.feasible:
        return False, "oracle found an envy-resolving extension"
    return True, "oracle search confirms infeasibility"


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.file))
    v = dispatch(inst, args.mode)
    _write(args.out, serialize_verdict(v))
    return 0 if v.feasible else 1


def cmd_check(args) -> int:
    inst = parse_instance(_read(args.instance))
    v = parse_verdict(_read(args.verdict))
    ok, msg = check_verdict(inst, v, args.cap)
    print(("PASS: " if ok else "FAIL: ") + msg)
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    inst = parse_instance(_read(args.file))
    k = args.k
    if k is None:
        k = inst.budget if not is_inf(inst.budget) else sum_finite_supplies(inst)
        if is_inf(k):
            raise FormatError("oracle needs --k when budget and some supply are infinite")
    v = oracle_bounded(inst, k, args.cap)
    _write(args.out, serialize_verdict(v))
    return 0 if v.feasible else 1


def cmd_envy_graph(args) -> int:
    inst = parse_instance(_read(args.file))
    for a, b, g in envy_graph(inst).sorted_edges():
        print(f"{a} -> {b} {g}")
    return 0


def cmd_generate(args) -> int:
    if args.kind in ("clique", "indset"):
        if args.graph is None or args.l is None:
            raise FormatError(f"generate {args.kind} needs a graph file and --l")
        g = SimpleGraph.from_json(_load_json(_read(args.graph)))
        inst = gen_clique(g, args.l) if args.kind == "clique" else gen_indset(g, args.l)
    elif args.kind == "binpacking":
        if args.u is None or args.bins is None or args.binsize is None:
            raise FormatError("generate binpacking needs --u, --bins and --binsize")
        sizes = tuple(int(x) for x in args.u.split(","))
        inst = gen_binpacking(BinPackingInput(sizes, args.bins, args.binsize))
    else:
        budget = "inf" if args.budget == "inf" else int(args.budget)
        inst = gen_random(
            args.agents,
            args.pool,
            args.max_value,
            args.supply,
            budget,
            args.seed,
            proportional_group=args.proportional,
            binary=args.binary,
            max_supply=args.max_supply,
        )
    _write(args.out, serialize_instance(inst))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="addgoods", description="Envy elimination by adding pool goods.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file ('-' for stdin)")
    s.add_argument("file")
    s.add_argument("--mode", choices=MODES, default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="recheck a verdict against its instance")
    c.add_argument("instance")
    c.add_argument("verdict")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("oracle", help="exhaustive search over extensions of size <= k")
    o.add_argument("file")
    o.add_argument("--k", type=int)
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("generate", help="write a generated instance")
    g.add_argument("kind", choices=("clique", "indset", "binpacking", "random"))
    g.add_argument("graph", nargs="?")
    g.add_argument("--l", type=int)
    g.add_argument("--u")
    g.add_argument("--bins", type=int)
    g.add_argument("--binsize", type=int)
    g.add_argument("--agents", type=int, default=3)
    g.add_argument("--pool", type=int, default=2)
    g.add_argument("--max-value", type=int, default=10)
    g.add_argument("--supply", choices=("inf", "finite", "mixed"), default="inf")
    g.add_argument("--max-supply", type=int, default=3)
    g.add_argument("--budget", default="inf")
    g.add_argument("--proportional", type=int, default=0)
    g.add_argument("--binary", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("envy-graph", help="print the initial envy edges with gaps")
    e.add_argument("file")
    e.set_defaults(func=cmd_envy_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, InstanceError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
