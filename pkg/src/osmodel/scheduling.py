"""CPU-time allocation and the switch algebra.

Time is a consumable pool: intervals are minted from a high-water mark and
never returned.  A context switch is the fixed operator sequence
select-close-select-schedule-resume; every trace satisfies close-before-
resume and schedule-before-resume within each episode.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .bindings import BindingTable, ONE_TO_ONE, bind
from .errors import MissingPriority, NoClosure, NotCurrent
from .pools import Region, ResourceKind, ResourcePool, make_set, select
from .procedures import Procedure

NULL_PROC = "p0"

OP_SEL = "Sel"
OP_CLOSE = "Close"
OP_SCHEDULE = "Schedule"
OP_RESUME = "Resume"
OP_IDLE = "Idle"
OP_LOADED = "Loaded"

ATTRIB_OS = "os"


@dataclass(frozen=True)
class SchedulePolicy:
    """Which order, and in which slice lengths, procedures consume time."""

    variant: str
    quantum: int | None = None

    _VARIANTS = ("fcfs", "sjf", "priority", "round_robin")

    def __post_init__(self):
        if self.variant not in self._VARIANTS:
            raise ValueError("unknown scheduling variant %r" % self.variant)
        if self.variant == "round_robin" and (self.quantum is None or self.quantum < 1):
            raise ValueError("round robin needs a quantum >= 1")
        if self.variant != "round_robin" and self.quantum is not None:
            raise ValueError("only round robin takes a quantum")

    @classmethod
    def fcfs(cls):
        return cls("fcfs")

    @classmethod
    def sjf(cls):
        return cls("sjf")

    @classmethod
    def priority(cls):
        return cls("priority")

    @classmethod
    def round_robin(cls, quantum: int):
        return cls("round_robin", quantum=quantum)


@dataclass(frozen=True)
class Closure:
    """Immutable snapshot of a procedure's stored context."""

    owner: str
    remaining_time: int
    bound_regions: tuple[Region, ...] = ()
    resume_count: int = 0


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    op: str
    proc: str
    attribution: str = ATTRIB_OS

    def line(self) -> str:
        return "%d\t%s\t%s\t%s" % (self.tick, self.op, self.proc, self.attribution)


class SwitchTrace:
    """Ordered event log of a run; one line per event when serialized."""

    def __init__(self):
        self.events: list[TraceEvent] = []
        #: set by run_simulation: the (procedure, interval) ledger
        self.intervals: BindingTable | None = None

    def log(self, tick: int, op: str, proc: str, attribution: str = ATTRIB_OS):
        self.events.append(TraceEvent(tick, op, proc, attribution))

    def lines(self) -> list[str]:
        return [e.line() for e in self.events]

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n" if self.events else ""

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


class Environment:
    """Interpretation context: stored closures plus the live current one.

    The null procedure always has a closure, is current when nothing else
    runs, and does not change the state of the system.
    """

    def __init__(self, null_name: str = NULL_PROC):
        self.null_name = null_name
        null_closure = Closure(null_name, 0)
        self.closures: dict[str, Closure] = {null_name: null_closure}
        self.current = null_name
        self.live = null_closure

    def admit(self, proc: Procedure, bound_regions=()) -> None:
        """Store the initial closure: full declared time, given regions."""
        if proc.name == self.null_name:
            raise ValueError("%r is reserved for the null procedure" % proc.name)
        if proc.name in self.closures:
            raise ValueError("procedure %s already admitted" % proc.name)
        self.closures[proc.name] = Closure(
            proc.name, proc.declared_time, tuple(bound_regions))

    def consume(self, ticks: int) -> None:
        """Account ticks against the live context of the current procedure."""
        if self.current != self.null_name:
            self.live = replace(
                self.live, remaining_time=self.live.remaining_time - ticks)


def carve_interval(time: ResourcePool, r: int) -> Region:
    """Mint the next r ticks of the consumable time pool; never fails."""
    if time.kind is not ResourceKind.TIME:
        raise ValueError("carve_interval needs a time pool")
    return make_set(time, r)


def build_schedule(procs, policy: SchedulePolicy) -> list[tuple[Procedure, int]]:
    """The ordered run plan: (procedure, slice length) pairs.

    fcfs/sjf/priority emit one whole-time slice per procedure in policy
    order with stable ties; round robin cycles the queue in quantum-sized
    slices until every remaining time reaches zero.
    """
    procs = list(procs)
    if not procs:
        raise ValueError("empty procedure list")
    if policy.variant == "fcfs":
        ordered = procs
    elif policy.variant == "sjf":
        ordered = sorted(procs, key=lambda p: p.declared_time)
    elif policy.variant == "priority":
        for p in procs:
            if p.priority is None:
                raise MissingPriority("procedure %s has no priority" % p.name)
        ordered = sorted(procs, key=lambda p: p.priority)
    else:  # round robin
        queue = deque([p, p.declared_time] for p in procs)
        plan = []
        while queue:
            item = queue.popleft()
            proc, left = item
            s = min(policy.quantum, left)
            plan.append((proc, s))
            if left - s > 0:
                item[1] = left - s
                queue.append(item)
        return plan
    return [(p, p.declared_time) for p in ordered]


def close_proc(env: Environment, p: str) -> Environment:
    """Compute the closure of the current procedure and store it."""
    if p != env.current:
        raise NotCurrent("%s is not current (%s is)" % (p, env.current))
    env.closures[p] = env.live
    return env


def schedule_next(env: Environment, p: str) -> Closure:
    """Look up the stored closure of the procedure to run next; pure."""
    try:
        return env.closures[p]
    except KeyError:
        raise NoClosure("no stored closure for %s" % p) from None


def resume_proc(env: Environment, closure: Closure, trace: SwitchTrace | None = None,
                tick: int = 0) -> Environment:
    """Restore a scheduled closure, making its owner current.

    Logs the resume and, on null-procedure transitions, an idle or loaded
    marker: resuming the null procedure from a user one idles the system,
    the converse loads it.
    """
    prev = env.current
    env.current = closure.owner
    env.live = replace(closure, resume_count=closure.resume_count + 1)
    if trace is not None:
        trace.log(tick, OP_RESUME, closure.owner)
        if closure.owner == env.null_name and prev != env.null_name:
            trace.log(tick, OP_IDLE, closure.owner)
        elif closure.owner != env.null_name and prev == env.null_name:
            trace.log(tick, OP_LOADED, closure.owner)
    return env


def _proc_name(entry) -> str:
    return entry.name if isinstance(entry, Procedure) else str(entry)


def switch(procs, i_cur: int, i_next: int, env: Environment, trace: SwitchTrace,
           tick: int = 0, cooperative: bool = False) -> Environment:
    """One context switch: Sel; close; Sel; schedule; resume.

    ``procs`` is a 1-indexed roster of procedures or names.  Switching a
    procedure to itself is a permitted no-op.  In cooperative mode the
    first Sel and the close are attributed to the outgoing procedure,
    otherwise to the OS.
    """
    outgoing = _proc_name(select(procs, i_cur))
    attrib = outgoing if cooperative else ATTRIB_OS
    trace.log(tick, OP_SEL, outgoing, attrib)
    close_proc(env, outgoing)
    trace.log(tick, OP_CLOSE, outgoing, attrib)
    incoming = _proc_name(select(procs, i_next))
    trace.log(tick, OP_SEL, incoming)
    closure = schedule_next(env, incoming)
    trace.log(tick, OP_SCHEDULE, incoming)
    return resume_proc(env, closure, trace, tick)


def run_simulation(procs, policy: SchedulePolicy, time: ResourcePool,
                   cooperative: bool = False, on_slice=None) -> SwitchTrace:
    """Drive a batch of procedures to completion and return the trace.

    Every planned slice is preceded by a switch to its procedure (a no-op
    switch when the quantum expires on the same procedure); the run ends
    with a switch back to the null procedure.  Each slice mints an interval
    from the time pool and binds it to the procedure in the interval
    ledger.  ``on_slice(proc, start_tick, length, executed)`` is invoked
    after each slice.
    """
    procs = list(procs)
    env = Environment()
    trace = SwitchTrace()
    trace.intervals = BindingTable(ONE_TO_ONE)
    if not procs:
        return trace
    for p in procs:
        env.admit(p)
    plan = build_schedule(procs, policy)
    roster = [env.null_name] + [p.name for p in procs]
    position = {name: i + 1 for i, name in enumerate(roster)}
    current = env.null_name
    tick = time.next_fresh
    executed = {p.name: 0 for p in procs}
    for proc, length in plan:
        switch(roster, position[current], position[proc.name], env, trace,
               tick=tick, cooperative=cooperative)
        interval = carve_interval(time, length)
        trace.intervals.append(bind(proc, interval))
        env.consume(length)
        start = tick
        tick += length
        executed[proc.name] += length
        current = proc.name
        if on_slice is not None:
            on_slice(proc, start, length, executed[proc.name])
    switch(roster, position[current], position[env.null_name], env, trace,
           tick=tick, cooperative=cooperative)
    return trace
