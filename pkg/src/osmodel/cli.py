"""Command line front end: run a workload file, or just validate it."""

from __future__ import annotations

import argparse
import sys

from .errors import (
    AuditFailed,
    Exhausted,
    OSModelError,
    ParseError,
    ValidationError,
)
from .workload import emit, parse_workload, run

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_EXHAUSTED = 4
EXIT_AUDIT = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osmodel",
        description="Run resource-management workloads: paged segmentation, "
                    "policy-driven allocation, and a scheduling simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="parse a workload file and run it")
    run_p.add_argument("workload", help="path to the workload file")
    run_p.add_argument("--emit", choices=("tables", "trace", "all"),
                       default="all", help="which sections to output")
    run_p.add_argument("--format", choices=("human", "machine"),
                       default="human", help="output format")
    run_p.add_argument("--hoist-frames", choices=("on", "off"), default="off",
                       help="frame all of physical memory before the "
                            "per-procedure loop")
    run_p.add_argument("--audit", action="store_true",
                       help="include per-pool per-phase audit results")
    run_p.add_argument("--out", default=None, help="write output to this path")

    check_p = sub.add_parser("check", help="validate a workload file without running")
    check_p.add_argument("workload", help="path to the workload file")
    return parser


def _read(path: str) -> str:
    with open(path) as handle:
        return handle.read()


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = _read(args.workload)
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        spec = parse_workload(text)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print("invalid workload: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "check":
        print("OK: %d procedure(s), mem %d, vmem %d, page %d"
              % (len(spec.procedures), spec.mem_capacity,
                 spec.vmem_capacity, spec.page_size))
        return EXIT_OK

    try:
        report = run(spec, hoist_frames=args.hoist_frames == "on")
    except Exhausted as exc:
        where = " in phase %r" % exc.phase if exc.phase else ""
        who = " (procedure %s)" % exc.procedure if exc.procedure else ""
        print("exhausted%s%s: %s" % (where, who, exc), file=sys.stderr)
        return EXIT_EXHAUSTED
    except AuditFailed as exc:
        print("audit failure: %s" % exc, file=sys.stderr)
        return EXIT_AUDIT
    except OSModelError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        emit(report, fmt=args.format, destination=args.out,
             sections=args.emit, include_audits=args.audit)
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
