"""Workload ingestion, end-to-end runs, and report emission.

A workload is a line-oriented plain-text batch: pool sizes, an allocation
policy, a scheduling policy, and the procedures in arrival order (file
order defines first-come-first-serve).  A run pages and segments the batch
over fresh virtual/physical pools, allocates it over a flat memory pool
with the same policy, then simulates the schedule (applying growth events
at slice boundaries), auditing every pool after each phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .allocation import (
    AllocationPolicy,
    allocate_all,
    apply_growth,
    internal_fragmentation,
)
from .errors import (
    AuditFailed,
    OSModelError,
    ParseError,
    ValidationError,
)
from .paging import PagingConfig, do_page_seg, serialize_tables
from .pools import AuditReport, ResourcePool, audit_partition
from .procedures import GrowthEvent, Procedure
from .scheduling import (
    NULL_PROC,
    OP_RESUME,
    SchedulePolicy,
    SwitchTrace,
    run_simulation,
)


@dataclass(frozen=True)
class WorkloadSpec:
    """A validated batch of procedures plus pool sizes and policies."""

    mem_capacity: int
    vmem_capacity: int
    page_size: int
    alloc_policy: AllocationPolicy
    sched_policy: SchedulePolicy
    procedures: tuple[Procedure, ...]


@dataclass
class AuditEntry:
    pool: str
    phase: str
    report: AuditReport


@dataclass
class RunReport:
    """Everything one run produced: tables, trace, audits, counters."""

    spec: WorkloadSpec
    allocation: object  # BindingTable
    segment_tables: list
    page_tables: list
    trace: SwitchTrace
    audits: list[AuditEntry] = field(default_factory=list)
    fragmentation_waste: int = 0
    switch_count: int = 0
    total_ticks: int = 0


# ---------------------------------------------------------------------------
# parsing


def _parse_nat(token: str, what: str, lineno: int) -> int:
    if not token.isdigit():
        raise ParseError("%s expects a natural number, got %r" % (what, token), lineno)
    return int(token)


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError("%s expects an integer, got %r" % (what, token),
                         lineno) from None


def _parse_alloc(token: str, lineno: int) -> AllocationPolicy:
    if token == "fcfs":
        return AllocationPolicy.fcfs()
    if token == "ssf":
        return AllocationPolicy.shortest_size_first()
    if token == "prio":
        return AllocationPolicy.priority()
    if token.startswith("fixed:"):
        return AllocationPolicy.fixed(
            _parse_nat(token[len("fixed:"):], "fixed partition", lineno))
    raise ParseError("unknown allocation policy %r" % token, lineno)


def _parse_sched(token: str, lineno: int) -> SchedulePolicy:
    if token == "fcfs":
        return SchedulePolicy.fcfs()
    if token == "sjf":
        return SchedulePolicy.sjf()
    if token == "prio":
        return SchedulePolicy.priority()
    if token.startswith("rr:"):
        quantum = _parse_nat(token[len("rr:"):], "round-robin quantum", lineno)
        if quantum < 1:
            raise ValidationError("round-robin quantum must be >= 1")
        return SchedulePolicy.round_robin(quantum)
    raise ParseError("unknown scheduling policy %r" % token, lineno)


def _parse_proc(args: list[str], lineno: int) -> Procedure:
    if not args or "=" in args[0]:
        raise ParseError("proc needs a name", lineno)
    name = args[0]
    fields: dict[str, str] = {}
    for token in args[1:]:
        if "=" not in token:
            raise ParseError("expected key=value, got %r" % token, lineno)
        key, _, value = token.partition("=")
        if key not in ("size", "time", "segs", "prio", "grow"):
            raise ParseError("unknown proc field %r" % key, lineno)
        if key in fields:
            raise ParseError("duplicate proc field %r" % key, lineno)
        fields[key] = value
    for key in ("size", "time", "segs"):
        if key not in fields:
            raise ValidationError(
                "line %d: proc %s is missing required field %r"
                % (lineno, name, key))
    size = _parse_nat(fields["size"], "size", lineno)
    time = _parse_nat(fields["time"], "time", lineno)
    segs = tuple(_parse_nat(t, "segs entry", lineno)
                 for t in fields["segs"].split(","))
    priority = (_parse_nat(fields["prio"], "prio", lineno)
                if "prio" in fields else None)
    growth = []
    if "grow" in fields:
        for item in fields["grow"].split(","):
            tick_s, sep, delta_s = item.partition(":")
            if not sep:
                raise ParseError("grow entries are tick:delta, got %r" % item,
                                 lineno)
            growth.append(GrowthEvent(_parse_nat(tick_s, "grow tick", lineno),
                                      _parse_int(delta_s, "grow delta", lineno)))
    try:
        return Procedure(name, size, time, segs, priority, tuple(growth))
    except ValueError as exc:
        raise ValidationError("line %d: proc %s: %s" % (lineno, name, exc)) from None


def parse_workload(text: str) -> WorkloadSpec:
    """Parse workload text into a validated WorkloadSpec.

    One directive per line, ``#`` starts a comment.  ``mem``, ``vmem``,
    ``page`` and at least one ``proc`` are required; ``alloc`` and
    ``policy`` default to fcfs.  Syntax problems raise ParseError with the
    line number; invariant violations raise ValidationError.
    """
    mem = vmem = page = None
    alloc = sched = None
    procs: list[Procedure] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        directive, *args = line.split()
        if directive in ("mem", "vmem", "page"):
            if len(args) != 1:
                raise ParseError("%s takes one argument" % directive, lineno)
            value = _parse_nat(args[0], directive, lineno)
            if directive == "mem":
                if mem is not None:
                    raise ParseError("duplicate mem directive", lineno)
                mem = value
            elif directive == "vmem":
                if vmem is not None:
                    raise ParseError("duplicate vmem directive", lineno)
                vmem = value
            else:
                if page is not None:
                    raise ParseError("duplicate page directive", lineno)
                page = value
        elif directive == "alloc":
            if len(args) != 1:
                raise ParseError("alloc takes one argument", lineno)
            if alloc is not None:
                raise ParseError("duplicate alloc directive", lineno)
            alloc = _parse_alloc(args[0], lineno)
        elif directive == "policy":
            if len(args) != 1:
                raise ParseError("policy takes one argument", lineno)
            if sched is not None:
                raise ParseError("duplicate policy directive", lineno)
            sched = _parse_sched(args[0], lineno)
        elif directive == "proc":
            procs.append(_parse_proc(args, lineno))
        else:
            raise ParseError("unknown directive %r" % directive, lineno)
    return _validate(mem, vmem, page, alloc, sched, procs)


def _validate(mem, vmem, page, alloc, sched, procs) -> WorkloadSpec:
    for what, value in (("mem", mem), ("vmem", vmem), ("page", page)):
        if value is None:
            raise ValidationError("missing required directive %r" % what)
        if value < 1:
            raise ValidationError("%s must be >= 1" % what)
    if not procs:
        raise ValidationError("workload needs at least one procedure")
    if mem % page != 0:
        raise ValidationError(
            "mem %d is not a multiple of page size %d" % (mem, page))
    names = [p.name for p in procs]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise ValidationError("duplicate procedure name %r" % dup)
    if NULL_PROC in names:
        raise ValidationError("%r is reserved for the null procedure" % NULL_PROC)
    alloc = alloc or AllocationPolicy.fcfs()
    sched = sched or SchedulePolicy.fcfs()
    needs_priority = (sched.variant == "priority"
                      or alloc.order.variant == "by_external_key")
    if needs_priority:
        missing = [p.name for p in procs if p.priority is None]
        if missing:
            raise ValidationError(
                "priority policy but no prio= on: %s" % ", ".join(missing))
    if alloc.fixed_partition is not None:
        largest = max(p.payload_size for p in procs)
        if alloc.fixed_partition < largest:
            raise ValidationError(
                "fixed partition %d smaller than largest payload %d"
                % (alloc.fixed_partition, largest))
    return WorkloadSpec(mem, vmem, page, alloc, sched, tuple(procs))


def _alloc_token(policy: AllocationPolicy) -> str:
    if policy.fixed_partition is not None:
        return "fixed:%d" % policy.fixed_partition
    return {"identity": "fcfs",
            "sort_ascending_by_size": "ssf",
            "by_external_key": "prio"}[policy.order.variant]


def _sched_token(policy: SchedulePolicy) -> str:
    if policy.variant == "round_robin":
        return "rr:%d" % policy.quantum
    return {"fcfs": "fcfs", "sjf": "sjf", "priority": "prio"}[policy.variant]


def serialize_workload(spec: WorkloadSpec) -> str:
    """Canonical workload text; parsing it yields an equal WorkloadSpec."""
    lines = [
        "mem %d" % spec.mem_capacity,
        "vmem %d" % spec.vmem_capacity,
        "page %d" % spec.page_size,
        "alloc %s" % _alloc_token(spec.alloc_policy),
        "policy %s" % _sched_token(spec.sched_policy),
    ]
    for p in spec.procedures:
        line = "proc %s size=%d time=%d segs=%s" % (
            p.name, p.payload_size, p.declared_time,
            ",".join(str(b) for b in p.seg_boundaries))
        if p.priority is not None:
            line += " prio=%d" % p.priority
        if p.growth_schedule:
            line += " grow=%s" % ",".join(
                "%d:%d" % (e.at_tick, e.delta) for e in p.growth_schedule)
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# running


def _label_phase(exc: OSModelError, phase: str) -> None:
    if getattr(exc, "phase", None) is None:
        exc.phase = phase


def run(spec: WorkloadSpec, hoist_frames: bool = False,
        cooperative: bool = False) -> RunReport:
    """Execute a workload end to end; deterministic for identical inputs.

    Phases: paging (segment/page tables over fresh virtual and physical
    pools), allocation (the same batch over a flat memory pool), schedule
    (time simulation; growth events fire once the owning procedure's
    executed ticks reach them).  Every pool is audited after each phase and
    a failing audit aborts the run.
    """
    config = PagingConfig(spec.page_size, spec.vmem_capacity,
                          spec.mem_capacity, hoist_frames)
    vm, phys = config.build_pools()
    flat = ResourcePool.memory(spec.mem_capacity)
    time = ResourcePool.time()
    audits: list[AuditEntry] = []

    def audited(pool, label, phase):
        audits.append(AuditEntry(label, phase, audit_partition(pool)))

    try:
        seg_tables, page_tables = do_page_seg(
            spec.procedures, vm, phys, spec.page_size,
            hoist_frames=hoist_frames, order=spec.alloc_policy.order)
    except OSModelError as exc:
        _label_phase(exc, "paging")
        raise
    audited(vm, "vmem", "paging")
    audited(phys, "mem", "paging")

    try:
        allocation = allocate_all(spec.procedures, flat, spec.alloc_policy)
    except OSModelError as exc:
        _label_phase(exc, "allocation")
        raise
    audited(flat, "mem", "allocation")

    pending = {p.name: list(p.growth_schedule) for p in spec.procedures}

    def on_slice(proc, start, length, executed):
        events = pending[proc.name]
        while events and events[0].at_tick <= executed:
            try:
                apply_growth(proc, events.pop(0), flat, allocation)
            except OSModelError as exc:
                _label_phase(exc, "growth")
                raise

    try:
        trace = run_simulation(spec.procedures, spec.sched_policy, time,
                               cooperative=cooperative, on_slice=on_slice)
    except OSModelError as exc:
        _label_phase(exc, "schedule")
        raise
    audited(time, "time", "schedule")
    audited(flat, "mem", "schedule")

    failing = [a for a in audits if not a.report.passed]
    if failing:
        raise AuditFailed("; ".join(
            "%s/%s: %s" % (a.pool, a.phase, "; ".join(a.report.violations))
            for a in failing))

    return RunReport(
        spec=spec,
        allocation=allocation,
        segment_tables=seg_tables,
        page_tables=page_tables,
        trace=trace,
        audits=audits,
        fragmentation_waste=internal_fragmentation(spec.procedures,
                                                   spec.alloc_policy),
        switch_count=sum(1 for e in trace if e.op == OP_RESUME),
        total_ticks=time.next_fresh,
    )


# ---------------------------------------------------------------------------
# emission


def _machine_lines(report: RunReport, sections: str,
                   include_audits: bool) -> list[str]:
    lines: list[str] = []
    if sections in ("tables", "all"):
        for binding in report.allocation:
            region = binding.right
            lines.append("ALLOC\t%s\t%d\t%d"
                         % (binding.left.name, region.u_min, region.u_max))
        table_text = serialize_tables(report.segment_tables, report.page_tables)
        lines.extend(table_text.splitlines())
    if sections in ("trace", "all"):
        lines.extend(report.trace.lines())
    if sections == "all":
        lines.append("SUMMARY\tfragmentation_waste\t%d" % report.fragmentation_waste)
        lines.append("SUMMARY\tswitch_count\t%d" % report.switch_count)
        lines.append("SUMMARY\ttotal_ticks\t%d" % report.total_ticks)
    if include_audits:
        for entry in report.audits:
            lines.append("AUDIT\t%s\t%s\t%s"
                         % (entry.pool, entry.phase,
                            "PASS" if entry.report.passed else "FAIL"))
    return lines


def _human_lines(report: RunReport, sections: str,
                 include_audits: bool) -> list[str]:
    spec = report.spec
    lines = ["workload: %d procedure(s), mem %d, vmem %d, page %d"
             % (len(spec.procedures), spec.mem_capacity,
                spec.vmem_capacity, spec.page_size),
             "alloc %s, policy %s" % (_alloc_token(spec.alloc_policy),
                                      _sched_token(spec.sched_policy)),
             ""]
    if sections in ("tables", "all"):
        lines.append("allocation")
        lines.append("  %-10s %-12s %s" % ("proc", "region", "size"))
        for binding in report.allocation:
            region = binding.right
            lines.append("  %-10s %-12s %d"
                         % (binding.left.name, region, region.size))
        lines.append("")
        lines.append("segment tables")
        lines.append("  %-10s %-4s %-12s %s" % ("proc", "seg", "proc span", "vm span"))
        for st in report.segment_tables:
            for row in st.rows:
                lines.append("  %-10s %-4d %-12s %s"
                             % (st.owner, row.seg_index, row.proc_span, row.vm_span))
        lines.append("")
        lines.append("page tables")
        lines.append("  %-10s %-4s %-5s %-12s %s"
                     % ("proc", "seg", "page", "vm span", "frame"))
        for pt in report.page_tables:
            owner, seg_index = pt.owner
            for row in pt.rows:
                lines.append("  %-10s %-4d %-5d %-12s %s"
                             % (owner, seg_index, row.page_index,
                                row.vm_span, row.frame))
        lines.append("")
    if sections in ("trace", "all"):
        lines.append("trace")
        lines.append("  %-6s %-9s %-10s %s" % ("tick", "op", "proc", "attribution"))
        for e in report.trace:
            lines.append("  %-6d %-9s %-10s %s"
                         % (e.tick, e.op, e.proc, e.attribution))
        lines.append("")
    if sections == "all":
        lines.append("summary")
        lines.append("  fragmentation waste: %d" % report.fragmentation_waste)
        lines.append("  switches: %d" % report.switch_count)
        lines.append("  total ticks: %d" % report.total_ticks)
        lines.append("")
    if include_audits:
        lines.append("audits")
        for entry in report.audits:
            lines.append("  %-6s %-12s %s"
                         % (entry.pool, entry.phase,
                            "PASS" if entry.report.passed else "FAIL"))
            for violation in entry.report.violations:
                lines.append("    %s" % violation)
        lines.append("")
    return lines


def render(report: RunReport, fmt: str = "human", sections: str = "all",
           include_audits: bool = False) -> str:
    """Render a run report as text; machine format is stable tab-separated
    rows, byte-identical across repeated identical runs."""
    if fmt not in ("human", "machine"):
        raise ValueError("unknown format %r" % fmt)
    if sections not in ("tables", "trace", "all"):
        raise ValueError("unknown section selector %r" % sections)
    make = _machine_lines if fmt == "machine" else _human_lines
    lines = make(report, sections, include_audits)
    return "\n".join(lines) + "\n" if lines else ""


def emit(report: RunReport, fmt: str = "human", destination=None,
         sections: str = "all", include_audits: bool = False) -> None:
    """Write a rendered report to a path, a file object, or stdout."""
    text = render(report, fmt, sections, include_audits)
    if destination is None:
        import sys
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w") as handle:
            handle.write(text)
