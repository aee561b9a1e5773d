"""Batch entry points: score, simulate, gen-prototypes, analyze, serve.

Exit codes: 0 success, 1 domain/validation failure, 2 I/O failure.
All randomized commands are deterministic under a fixed --seed.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
from pathlib import Path

from . import analysis, geometry
from .agents import AgentKind, AgentProfile, run_agent_session
from .errors import CubeError, TooManyCubes
from .eventlog import load_record
from .geometry import ShapeType
from .measures import compute_measures
from .similarity import similarity_trace
from .tasks import (
    MAX_PROTOTYPE_CUBES,
    default_library_path,
    export_session,
    iter_session_dirs,
    load_library,
    load_session_dir,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--seed", type=int, default=0, help="RNG seed; fixed seed, fixed output")
    sub.add_argument("--out", type=Path, default=None, help="output file or directory")
    sub.add_argument(
        "--format",
        choices=("csv", "lines"),
        default="lines",
        help="stdout format for scalar results",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubeassess",
        description="Cube-construction assessment: scoring, simulation, generation, analysis, serving.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one task log against a prototype shape file")
    p.add_argument("log", type=Path, help="JSON Lines task log")
    p.add_argument("prototype", type=Path, help="prototype shape file")
    p.add_argument("--trace", type=Path, default=None, help="also write the similarity trace CSV here")
    _common_flags(p)

    p = sub.add_parser("simulate", help="run seeded agents through a task library")
    p.add_argument("--library", type=Path, default=None, help="task library JSON (default: packaged demo)")
    p.add_argument(
        "--agent",
        action="append",
        default=None,
        metavar="KIND[:COUNT]",
        help="agent profile, repeatable; kinds: monotone, slow, erratic",
    )
    _common_flags(p)

    p = sub.add_parser("gen-prototypes", help="generate random prototype shape files")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--cells", type=int, required=True, help=f"cubes per prototype (1..{MAX_PROTOTYPE_CUBES})")
    p.add_argument("--shape-type", choices=("2d", "3d"), default=None)
    _common_flags(p)

    p = sub.add_parser("analyze", help="aggregate a directory of exported sessions")
    p.add_argument("sessions", type=Path, help="directory containing session subdirectories")
    _common_flags(p)

    p = sub.add_parser("serve", help="run the live session HTTP service")
    p.add_argument("--listen", default=os.environ.get("CUBEASSESS_LISTEN", "127.0.0.1:8000"))
    p.add_argument(
        "--sessions-dir",
        type=Path,
        default=Path(os.environ.get("CUBEASSESS_SESSIONS_DIR", "sessions")),
    )
    p.add_argument("--library", type=Path, default=None)
    p.add_argument(
        "--assessor-token", default=os.environ.get("CUBEASSESS_ASSESSOR_TOKEN") or None
    )
    _common_flags(p)

    return parser


# ---------------------------------------------------------------------------
# score


def _print_measures(m, fmt: str):
    values = [
        ("similarity", float(m.similarity)),
        ("last_connect", m.last_connect),
        ("derivative", float(m.derivative)),
        ("zero_crossings", m.zero_crossings),
    ]
    if fmt == "csv":
        w = csv.writer(sys.stdout)
        w.writerow([k for k, _ in values])
        w.writerow([repr(v) for _, v in values])
    else:
        for k, v in values:
            print(f"{k} {v!r}")


def cmd_score(args) -> int:
    try:
        record = load_record(args.log)
        prototype = geometry.load_shape(args.prototype).cells
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        m = compute_measures(record, prototype)
        if args.trace:
            trace = similarity_trace(record, prototype)
            with open(args.trace, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "similarity"])
                for t, value in trace:
                    w.writerow([repr(t), repr(float(value))])
    except CubeError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    _print_measures(m, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _parse_agents(raw: list[str] | None) -> list[AgentKind]:
    kinds = []
    for token in raw or ["monotone:1"]:
        name, _, count = token.partition(":")
        kind = AgentKind(name)
        kinds.extend([kind] * (int(count) if count else 1))
    return kinds


def cmd_simulate(args) -> int:
    out = args.out or Path("simulated-sessions")
    library = args.library or default_library_path()
    try:
        tasks = load_library(library)
        kinds = _parse_agents(args.agent)
    except (CubeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    out.mkdir(parents=True, exist_ok=True)
    for i, kind in enumerate(kinds):
        profile = AgentProfile(kind, seed=args.seed * 7919 + i)
        code = f"{kind.value}-{i:03d}"
        session = run_agent_session(profile, tasks, f"sim-{code}", code)
        export_session(session, out / session.session_id)
        print(f"{session.session_id}: {len(session.records)} tasks -> {out / session.session_id}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen-prototypes


def cmd_gen_prototypes(args) -> int:
    if args.cells > MAX_PROTOTYPE_CUBES:
        e = TooManyCubes(f"prototypes are capped at {MAX_PROTOTYPE_CUBES} cubes, got {args.cells}")
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.cells < 1:
        print("error: need at least one cell", file=sys.stderr)
        return EXIT_VALIDATION
    kind = ShapeType(args.shape_type) if args.shape_type else None
    rng = random.Random(args.seed)
    out = args.out or Path("prototypes")
    out.mkdir(parents=True, exist_ok=True)

    seen = set()
    written = 0
    attempts = 0
    while written < args.count and attempts < args.count * 500:
        attempts += 1
        try:
            shape = geometry.random_connected_polycube(rng, args.cells, kind)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_VALIDATION
        canon = geometry.canonical_form(shape)
        if canon in seen:
            continue
        seen.add(canon)
        shape_id = f"proto-{written:03d}"
        hint = f"{args.cells} cells {geometry.shape_type(shape).value}"
        geometry.save_shape(
            geometry.ShapeFile(cells=shape, shape_id=shape_id, hint=hint),
            out / f"{shape_id}.txt",
        )
        written += 1
    if written < args.count:
        print(
            f"note: only {written} distinct shapes of {args.cells} cells found",
            file=sys.stderr,
        )
    print(f"wrote {written} prototypes -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    if not args.sessions.is_dir():
        print(f"error: {args.sessions} is not a directory", file=sys.stderr)
        return EXIT_IO
    out = args.out or (args.sessions / "analysis")
    out.mkdir(parents=True, exist_ok=True)

    artifacts = []
    problems = []
    for directory in iter_session_dirs(args.sessions):
        try:
            artifacts.append(load_session_dir(directory))
        except Exception as e:
            problems.append(f"{directory.name}: {type(e).__name__}: {e}")
    if not artifacts:
        print("error: no readable sessions found", file=sys.stderr)
        return EXIT_VALIDATION

    rows, table_problems = analysis.measure_table(artifacts)
    problems.extend(table_problems)
    (out / "measures.csv").write_text(analysis.table_csv(rows), encoding="utf-8")

    by = ("group",)
    stats = analysis.aggregate(rows, by=by)
    (out / "aggregate.csv").write_text(
        analysis.aggregate_csv(stats, by, analysis.group_sizes(rows, by)), encoding="utf-8"
    )

    pairs, notes = analysis.measure_correlations(rows)
    with open(out / "correlations.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["measure_a", "measure_b", "pearson_r"])
        for a, b, r in pairs:
            w.writerow([a, b, repr(r)])
    for note in notes:
        print(f"correlations: {note}", file=sys.stderr)

    # curves and trees only take records that replay cleanly; measure_table
    # already reported the corrupt ones
    from .events import replay

    records = []
    for art in artifacts:
        for r in art.records:
            if not r.events:
                continue
            try:
                replay(r)
            except CubeError:
                continue
            records.append(r)
    prototypes = {}
    for art in artifacts:
        prototypes.update(art.prototypes)
    (out / "curves.csv").write_text(analysis.export_curves(records, prototypes), encoding="utf-8")

    trees_dir = out / "trees"
    trees_dir.mkdir(exist_ok=True)
    by_task: dict[str, list] = {}
    for r in records:
        by_task.setdefault(r.task_id, []).append(r)
    import json as _json

    for task_id, recs in sorted(by_task.items()):
        tree = analysis.build_sequence_tree(recs)
        (trees_dir / f"{task_id}.txt").write_text(tree.to_text(), encoding="utf-8")
        (trees_dir / f"{task_id}.json").write_text(
            _json.dumps(tree.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    for problem in problems:
        print(f"skipped: {problem}", file=sys.stderr)
    print(f"analyzed {len(rows)} task records from {len(artifacts)} sessions -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args) -> int:
    from .service import ServiceConfig, run

    host, _, port = args.listen.partition(":")
    config = ServiceConfig(
        sessions_dir=args.sessions_dir,
        library_path=args.library or default_library_path(),
        assessor_token=args.assessor_token,
    )
    run(config, host=host or "127.0.0.1", port=int(port or 8000))
    return EXIT_OK


COMMANDS = {
    "score": cmd_score,
    "simulate": cmd_simulate,
    "gen-prototypes": cmd_gen_prototypes,
    "analyze": cmd_analyze,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
