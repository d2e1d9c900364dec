"""Command-line front end.

Subcommands generate, inspect and transform access structures, compute
share-size bounds with certificates, replay certificates, and run the
lemma and chain regression suites.  Output is deterministic JSON (stable
key order, rationals as "p/q" strings, no floats) or a human-readable
text rendering that prints sets as (1,2) tuples and the purifying party
as ``p``.

Exit codes: 0 success / implied / verified; 1 a checked property fails
or a certificate is rejected; 2 usage error or malformed input; 3
capacity or element limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .simplex import rat_str
from .prover import (
    DEFAULT_ELEMENT_LIMIT,
    Objective,
    cached_system,
    certificate_from_json_dict,
    lemma_suite,
    share_bound,
    theorem3_chain,
    verify_certificate,
)
from .structures import (
    AccessStructure,
    CapacityError,
    StructureError,
    csirmaz,
    dual,
    is_quantum,
    is_self_dual,
    purify,
    structure_from_dict,
    structure_to_dict,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(data: dict, out: str | None) -> None:
    _emit(json.dumps(data, ensure_ascii=False, indent=2) + "\n", out)


def _load_structure(path: str) -> AccessStructure:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return structure_from_dict(data)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc
    except StructureError as exc:
        raise UsageError(f"invalid access structure in {path}: {exc}") from exc


def _format_sets(structure: AccessStructure, purifier: int | None = None) -> str:
    parts = []
    for m in structure.minimal_sets:
        names = [
            "p" if p == purifier else str(p) for p in m.players()
        ]
        parts.append("(" + ",".join(names) + ")")
    return "; ".join(parts)


def _structure_text(structure: AccessStructure, purifier: int | None = None) -> str:
    return (
        f"players: {structure.n}\n"
        f"minimal sets: {_format_sets(structure, purifier)}\n"
    )


def _parse_players(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(p) for p in text.replace(" ", "").split(",") if p)
    except ValueError as exc:
        raise UsageError(f"bad --players list {text!r}") from exc


def cmd_gen(args) -> int:
    if args.family != "csirmaz":
        raise UsageError(f"unknown family {args.family!r}; available: csirmaz")
    structure, params = csirmaz(args.n)
    data = structure_to_dict(structure)
    data["k"] = params.k
    if args.format == "text":
        _emit(_structure_text(structure) + f"k: {params.k}\n", args.out)
    else:
        _dump_json(data, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        structure = _load_structure(args.infile)
    except UsageError as exc:
        if "invalid access structure" not in str(exc):
            raise
        _dump_json({"valid_antichain": False, "error": str(exc)}, args.out)
        return EXIT_FAIL
    report = {
        "n": structure.n,
        "minimal_sets": structure.minimal_player_lists(),
        "valid_antichain": True,
        "is_quantum": is_quantum(structure),
        "is_self_dual": is_self_dual(structure),
    }
    if args.format == "text":
        _emit(
            _structure_text(structure)
            + f"valid antichain: yes\n"
            + f"quantum: {'yes' if report['is_quantum'] else 'no'}\n"
            + f"self-dual: {'yes' if report['is_self_dual'] else 'no'}\n",
            args.out,
        )
    else:
        _dump_json(report, args.out)
    return EXIT_OK if report["is_quantum"] else EXIT_FAIL


def cmd_dual(args) -> int:
    structure = _load_structure(args.infile)
    result = dual(structure)
    if args.format == "text":
        _emit(_structure_text(result), args.out)
    else:
        _dump_json(structure_to_dict(result), args.out)
    return EXIT_OK


def cmd_purify(args) -> int:
    structure = _load_structure(args.infile)
    result = purify(structure)
    purifier = result.n if result.n > structure.n else None
    if args.format == "text":
        _emit(_structure_text(result, purifier), args.out)
    else:
        _dump_json(structure_to_dict(result), args.out)
    return EXIT_OK


def _validate_objective(spec: str) -> str:
    if spec in ("minmax", "minsum"):
        return spec
    if spec.startswith("single:") and spec[len("single:"):].isdigit():
        return spec
    raise UsageError(f"bad --objective {spec!r}; use minmax, minsum or single:<i>")


def _bound_options(args) -> dict:
    return {
        "auto_purify": args.auto_purify,
        "mode": args.mode,
        "ineq": args.ineq,
        "objective": _validate_objective(args.objective),
        "players": _parse_players(args.players),
        "max_elements": args.limit_elements,
        "force": args.force,
    }


def _bound_one(path: str, options: dict) -> dict:
    structure = _load_structure(path)
    report = share_bound(structure, **options)
    return report.to_json_dict()


def _bound_text(data: dict) -> str:
    purifier = data["structure"]["n"] if data["purified"] else None
    sets = "; ".join(
        "(" + ",".join("p" if p == purifier else str(p) for p in ms) + ")"
        for ms in data["structure"]["minimal_sets"]
    )
    obj = data["objective"]
    if obj["kind"] == "single":
        obj_text = f"single share {obj['player']}"
    else:
        obj_text = f"{obj['kind']} over players " + ",".join(map(str, obj["players"]))
    lines = [
        f"structure: {sets}" + (" [purified]" if data["purified"] else ""),
        f"mode: {data['mode']}   inequalities: {data['ineq']}",
        f"objective: {obj_text}",
        f"largest share >= {data['lp_value']} * S(secret)",
        f"information rate <= {data['rate_upper_bound']}",
    ]
    if data["theorem3_bound"]:
        lines.append(f"closed-form reference (k={data['k']}): {data['theorem3_bound']}")
    s = data["stats"]
    lines.append(
        f"lp: {s['rows']} rows, {s['cols']} cols, {s['pivots']} pivots, {s['millis']} ms"
    )
    return "\n".join(lines) + "\n"


def cmd_bound(args) -> int:
    options = _bound_options(args)
    if args.batch:
        return _cmd_bound_batch(args, options)
    if not args.infile:
        raise UsageError("bound needs --in FILE (or --batch DIR)")
    data = _bound_one(args.infile, options)
    if args.certificate:
        _dump_json(data["certificate"], args.certificate)
    if args.dump_system:
        solved = structure_from_dict(data["structure"])
        system = cached_system(solved, args.mode == "pure", args.ineq)
        with open(args.dump_system, "w", encoding="utf-8") as fh:
            fh.write(system.dump() + "\n")
    if args.format == "text":
        _emit(_bound_text(data), args.out)
    else:
        _dump_json(data, args.out)
    return EXIT_OK


def _batch_worker(job: tuple[str, dict]) -> tuple[str, str, dict | str]:
    path, options = job
    try:
        return path, "ok", _bound_one(path, options)
    except (UsageError, StructureError) as exc:
        return path, "error", str(exc)
    except CapacityError as exc:
        return path, "limit", str(exc)


def _cmd_bound_batch(args, options: dict) -> int:
    directory = args.batch
    try:
        names = sorted(
            f for f in os.listdir(directory)
            if f.endswith(".json") and not f.endswith(".report.json")
        )
    except OSError as exc:
        raise UsageError(f"cannot list {directory}: {exc}") from exc
    if not names:
        raise UsageError(f"no .json inputs in {directory}")
    jobs = [(os.path.join(directory, name), options) for name in names]
    workers = max(1, min(args.workers, len(jobs)))
    if workers == 1:
        results = [_batch_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_worker, jobs))
    out_dir = args.out or directory
    summary = []
    for path, status, payload in results:
        name = os.path.basename(path)
        entry = {"file": name, "status": status}
        if status == "ok":
            report_path = os.path.join(out_dir, name[: -len(".json")] + ".report.json")
            _dump_json(payload, report_path)
            entry["lp_value"] = payload["lp_value"]
            entry["report"] = os.path.basename(report_path)
        else:
            entry["error"] = payload
        summary.append(entry)
    _dump_json({"batch": summary}, None)
    return EXIT_OK if all(e["status"] == "ok" for e in summary) else EXIT_FAIL


def cmd_verify_cert(args) -> int:
    structure = _load_structure(args.system_from)
    try:
        with open(args.cert, encoding="utf-8") as fh:
            cert = certificate_from_json_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read certificate {args.cert}: {exc}") from exc

    solved = structure
    if args.mode == "pure" and not is_self_dual(structure):
        if not args.auto_purify:
            raise StructureError(
                "pure mode needs a self-dual structure; pass --auto-purify"
            )
        solved = purify(structure)
    if solved.n + 1 > args.limit_elements and not args.force:
        raise CapacityError(
            f"{solved.n + 1} elements exceed --limit-elements {args.limit_elements}"
        )
    system = cached_system(solved, args.mode == "pure", args.ineq)
    players = _parse_players(args.players) or tuple(range(1, solved.n + 1))
    objective = Objective.parse(_validate_objective(args.objective), players)
    try:
        ok = verify_certificate(system, cert, objective=objective)
    except KeyError as exc:
        _dump_json({"verified": False, "error": str(exc)}, args.out)
        return EXIT_FAIL
    _dump_json(
        {"verified": bool(ok), "claimed_bound": rat_str(cert.claimed_bound)}, args.out
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lemmas(args) -> int:
    structure = _load_structure(args.infile)
    solved = structure
    if not is_self_dual(structure):
        if not args.auto_purify:
            raise StructureError(
                "lemma checks run on self-dual structures; pass --auto-purify"
            )
        solved = purify(structure)
    report = lemma_suite(
        solved,
        ineq=args.ineq,
        max_elements=args.limit_elements,
        force=args.force,
    )
    data = report.to_json_dict()
    if args.format == "text":
        failures = report.failures()
        _emit(
            f"instances: {len(report.outcomes)}\n"
            f"implied: {len(report.outcomes) - len(failures)}\n"
            f"failures: {', '.join(o.instance.id for o in failures) or 'none'}\n",
            args.out,
        )
    else:
        _dump_json(data, args.out)
    return EXIT_OK if report.all_implied else EXIT_FAIL


def cmd_chain(args) -> int:
    report = theorem3_chain(
        args.n,
        ineq=args.ineq,
        max_elements=args.limit_elements,
        force=args.force,
    )
    data = report.to_json_dict()
    if args.format == "text":
        lines = [f"k = {report.k}, closed-form bound {data['theorem3_bound']}"]
        for step in report.steps:
            mark = "ok " if step.implied else "FAIL"
            lines.append(f"  [{mark}] {step.instance.description}")
        lines.append(f"lp value: {data['lp_value']} (rate <= {data['rate_upper_bound']})")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _dump_json(data, args.out)
    return EXIT_OK if report.all_implied else EXIT_FAIL


def _add_common(parser: argparse.ArgumentParser, *, bound_flags: bool) -> None:
    parser.add_argument("--out", help="write the main JSON output to this path")
    parser.add_argument(
        "--format", choices=("json", "text"), default="json", help="output format"
    )
    if bound_flags:
        parser.add_argument("--mode", choices=("pure", "mixed"), default="pure")
        parser.add_argument("--ineq", choices=("full", "elemental"), default="full")
        parser.add_argument(
            "--objective",
            default="minmax",
            help="minmax | minsum | single:<i>",
        )
        parser.add_argument("--players", help="comma-separated share indices")
        parser.add_argument("--auto-purify", action="store_true", dest="auto_purify")
        parser.add_argument(
            "--limit-elements",
            type=int,
            default=DEFAULT_ELEMENT_LIMIT,
            help="largest allowed ground-set size without --force",
        )
        parser.add_argument("--force", action="store_true", help="override the limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qssbounds",
        description="Share-size bounds for quantum secret sharing access structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a named access-structure family")
    p.add_argument("family", help="family name (csirmaz)")
    p.add_argument("--n", type=int, required=True, help="player count")
    _add_common(p, bound_flags=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="validate a structure and report properties")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p, bound_flags=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dual", help="dual access structure")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p, bound_flags=False)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("purify", help="self-dualize by adding one party")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p, bound_flags=False)
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("bound", help="prove a share-size lower bound")
    p.add_argument("--in", dest="infile")
    p.add_argument("--batch", help="directory of structure JSON files")
    p.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1))
    p.add_argument("--certificate", help="also write the certificate JSON here")
    p.add_argument(
        "--dump-system",
        dest="dump_system",
        help="debug: write the generated constraint system as text",
    )
    _add_common(p, bound_flags=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify-cert", help="replay a certificate against a fresh system")
    p.add_argument("--system-from", dest="system_from", required=True)
    p.add_argument("--cert", required=True)
    _add_common(p, bound_flags=True)
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("lemmas", help="check the scheme relations are all implied")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p, bound_flags=True)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("chain", help="replay the staircase telescoping argument")
    p.add_argument("--n", type=int, required=True)
    _add_common(p, bound_flags=True)
    p.set_defaults(func=cmd_chain)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except StructureError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
