"""Memory allocation over a pool: policy-ordered batch binding, dynamic
growth and shrink, and whole-procedure release."""

from __future__ import annotations

from dataclasses import dataclass

from .bindings import BindingTable, ONE_TO_ONE, bind
from .errors import Exhausted, NotBound, ShrinkBelowZero
from .pools import (
    OrgSpec,
    Region,
    ResourcePool,
    audit_partition,
    make_set,
    make_spec_set,
    organize,
    release_set,
)
from .procedures import GrowthEvent, Procedure


@dataclass(frozen=True)
class AllocationPolicy:
    """How a batch of procedures is ordered and sized for allocation.

    Identity order is first-come-first-serve; ascending size order is
    shortest-size-first; an external priority key gives priority allocation.
    With ``fixed_partition`` every procedure gets a partition of that
    constant size (the tail is internal fragmentation); otherwise regions
    are sized to each payload.
    """

    order: OrgSpec = OrgSpec.identity()
    fixed_partition: int | None = None

    def __post_init__(self):
        if self.fixed_partition is not None and self.fixed_partition < 1:
            raise ValueError("fixed partition size must be >= 1")

    @classmethod
    def fcfs(cls):
        return cls(OrgSpec.identity())

    @classmethod
    def shortest_size_first(cls):
        return cls(OrgSpec.sort_ascending_by_size())

    @classmethod
    def priority(cls):
        return cls(OrgSpec.by_external_key("priority"))

    @classmethod
    def fixed(cls, partition_size: int):
        return cls(OrgSpec.identity(), fixed_partition=partition_size)


def _region_for(policy: AllocationPolicy, proc: Procedure) -> int:
    if policy.fixed_partition is not None:
        return policy.fixed_partition
    return proc.payload_size


def allocate_all(procs, memory: ResourcePool,
                 policy: AllocationPolicy | None = None) -> BindingTable:
    """Bind a region to every procedure, in policy order, atomically.

    For each procedure: check availability, carve first-fit, move the region
    free -> occupied, bind, append.  If any procedure cannot be placed the
    whole batch rolls back and the failure names the procedure.
    """
    policy = policy or AllocationPolicy.fcfs()
    report = audit_partition(memory)
    if not report.passed:
        raise ValueError("memory pool failed audit: %s" % "; ".join(report.violations))
    ordered = organize(list(procs), policy.order)
    if policy.fixed_partition is not None and ordered:
        largest = max(p.payload_size for p in ordered)
        if policy.fixed_partition < largest:
            raise ValueError(
                "fixed partition %d smaller than largest payload %d"
                % (policy.fixed_partition, largest))
    table = BindingTable(ONE_TO_ONE)
    snap = memory.snapshot()
    for proc in ordered:
        r = _region_for(policy, proc)
        try:
            if memory.total_free < r:
                raise Exhausted(
                    "need %d elements, %d free" % (r, memory.total_free))
            region = make_set(memory, r)
        except Exhausted as exc:
            memory.restore(snap)
            exc.procedure = proc.name
            raise
        table.append(bind(proc, region))
    return table


def apply_growth(proc: Procedure, event: GrowthEvent, memory: ResourcePool,
                 table: BindingTable) -> BindingTable:
    """Grow or shrink a procedure's bound memory by one growth event.

    Positive deltas carve an additional region (a procedure may hold several
    after growth).  Negative deltas release the most recently added regions
    first, splitting the last one if needed.  Zero deltas change nothing.
    """
    mine = table.bindings_for(proc)
    if not mine:
        raise NotBound("procedure %s holds no binding" % proc.name)
    if event.delta == 0:
        return table
    if event.delta > 0:
        try:
            region = make_set(memory, event.delta)
        except Exhausted as exc:
            exc.procedure = proc.name
            raise
        table.append(bind(proc, region))
        return table

    need = -event.delta
    total = sum(b.right.size for b in mine)
    if need > total:
        raise ShrinkBelowZero(
            "procedure %s holds %d units, cannot shrink by %d"
            % (proc.name, total, need))
    for binding in reversed(mine):
        if need == 0:
            break
        region: Region = binding.right
        if region.size <= need:
            memory.reclaim(region)
            table.remove(binding)
            need -= region.size
        else:
            # free the high-address tail, keep the low span in place
            memory.reclaim(region)
            kept = make_spec_set(memory, region.u_min, region.u_max - need)
            table.replace(binding, bind(proc, kept))
            need = 0
    return table


def free_procedure(proc: Procedure, memory: ResourcePool,
                   table: BindingTable) -> BindingTable:
    """Release every region bound to the procedure and drop its bindings."""
    mine = table.bindings_for(proc)
    if not mine:
        raise NotBound("procedure %s holds no binding" % proc.name)
    for binding in mine:
        release_set(memory, binding, table)
    return table


def internal_fragmentation(procs, policy: AllocationPolicy) -> int:
    """Units wasted inside fixed partitions (zero for variable sizing)."""
    if policy.fixed_partition is None:
        return 0
    return sum(policy.fixed_partition - p.payload_size for p in procs)
