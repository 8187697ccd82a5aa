"""Enumerated resource pools, contiguous regions, and partition audits.

A pool is an enumerated set of resource elements split into two ledgers:
free and occupied.  Regions are contiguous address spans; carving one moves
it from the free ledger to the occupied ledger, releasing does the inverse
(reusable pools only).  The audit checks the four partition invariants that
make the ledgers an equivalence-class partitioning of the pool.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from math import ceil

from .errors import (
    ConsumableResource,
    Exhausted,
    IndexOutOfRange,
    MissingKey,
    NoContiguousRun,
    SpanNotFree,
    SpanOutOfBounds,
    UniverseTooSmall,
    UnknownBinding,
)


class ResourceKind(Enum):
    MEMORY = "memory"
    VIRTUAL_MEMORY = "vmem"
    TIME = "time"
    NAMES = "names"
    #: address space of a single procedure; spans of it are never pooled
    PROCEDURE = "proc"


#: pool kinds that admit release of carved subsets
_REUSABLE = {ResourceKind.MEMORY, ResourceKind.VIRTUAL_MEMORY, ResourceKind.NAMES}
#: pool kinds backed by a fixed number of elements
_FINITE = {ResourceKind.MEMORY, ResourceKind.VIRTUAL_MEMORY}


@dataclass(frozen=True)
class Region:
    """A contiguous enumerated span [u_min..u_max] of some address space."""

    kind: ResourceKind
    u_min: int
    u_max: int

    def __post_init__(self):
        if self.u_min < 0 or self.u_max < self.u_min:
            raise ValueError("invalid span [%r..%r]" % (self.u_min, self.u_max))

    @property
    def size(self) -> int:
        return self.u_max - self.u_min + 1

    def contains(self, addr: int) -> bool:
        return self.u_min <= addr <= self.u_max

    def overlaps(self, other: "Region") -> bool:
        return self.u_min <= other.u_max and other.u_min <= self.u_max

    def __str__(self):
        return "[%d..%d]" % (self.u_min, self.u_max)


class ResourcePool:
    """An enumerated resource set with disjoint free/occupied ledgers.

    Traits follow the kind: memory pools are finite and reusable, time pools
    are infinite and consumable, name pools are infinite and reusable.
    Infinite pools never materialize their elements; ``next_fresh`` is the
    lowest address that has never been issued.
    """

    def __init__(self, kind: ResourceKind, capacity: int | None = None):
        self.kind = kind
        self.reusable = kind in _REUSABLE
        self.finite = kind in _FINITE
        if self.finite:
            if capacity is None or capacity < 1:
                raise ValueError("finite pools need a capacity >= 1")
            self.capacity = capacity
            self.free = [Region(kind, 0, capacity - 1)]
        else:
            if capacity is not None:
                raise ValueError("infinite pools take no capacity")
            self.capacity = None
            self.free = []
        self.occupied: list[Region] = []
        self.next_fresh = 0

    @classmethod
    def memory(cls, capacity: int) -> "ResourcePool":
        return cls(ResourceKind.MEMORY, capacity)

    @classmethod
    def virtual_memory(cls, capacity: int) -> "ResourcePool":
        return cls(ResourceKind.VIRTUAL_MEMORY, capacity)

    @classmethod
    def time(cls) -> "ResourcePool":
        return cls(ResourceKind.TIME)

    @classmethod
    def names(cls) -> "ResourcePool":
        return cls(ResourceKind.NAMES)

    @property
    def total_free(self) -> int:
        return sum(r.size for r in self.free)

    @property
    def total_occupied(self) -> int:
        return sum(r.size for r in self.occupied)

    def snapshot(self):
        """Cheap copy of the ledger state, for rollback."""
        return tuple(self.free), tuple(self.occupied), self.next_fresh

    def restore(self, snap) -> None:
        self.free = list(snap[0])
        self.occupied = list(snap[1])
        self.next_fresh = snap[2]

    def reclaim(self, region: Region) -> None:
        """Move a region occupied -> free, coalescing adjacent free runs.

        Ledger-level mechanism; release_set is the binding-aware wrapper.
        """
        if not self.reusable:
            raise ConsumableResource(
                "%s pool elements cannot be returned" % self.kind.value)
        try:
            self.occupied.remove(region)
        except ValueError:
            raise UnknownBinding(
                "region %s is not in the occupied ledger" % region) from None
        starts = [r.u_min for r in self.free]
        i = bisect.bisect_left(starts, region.u_min)
        self.free.insert(i, region)
        if i + 1 < len(self.free) and self.free[i].u_max + 1 == self.free[i + 1].u_min:
            nxt = self.free.pop(i + 1)
            self.free[i] = Region(self.kind, self.free[i].u_min, nxt.u_max)
        if i > 0 and self.free[i - 1].u_max + 1 == self.free[i].u_min:
            cur = self.free.pop(i)
            self.free[i - 1] = Region(self.kind, self.free[i - 1].u_min, cur.u_max)

    def __repr__(self):
        body = "free=%s occupied=%s" % (
            [str(r) for r in self.free], [str(r) for r in self.occupied])
        if not self.finite:
            body += " next_fresh=%d" % self.next_fresh
        return "<%s pool %s>" % (self.kind.value, body)


# ---------------------------------------------------------------------------
# ordering


@dataclass(frozen=True)
class OrgSpec:
    """A rearrangement (or chunk overlay) applied to an ordered collection."""

    variant: str
    chunk_size: int | None = None
    key_name: str | None = None

    _VARIANTS = ("identity", "constant_chunk", "sort_ascending_by_size",
                 "sort_descending_by_size", "by_external_key")

    def __post_init__(self):
        if self.variant not in self._VARIANTS:
            raise ValueError("unknown ordering variant %r" % self.variant)
        if self.variant == "constant_chunk" and (
                self.chunk_size is None or self.chunk_size < 1):
            raise ValueError("constant_chunk needs chunk_size >= 1")
        if self.variant == "by_external_key" and not self.key_name:
            raise ValueError("by_external_key needs a key name")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def constant_chunk(cls, chunk_size: int):
        return cls("constant_chunk", chunk_size=chunk_size)

    @classmethod
    def sort_ascending_by_size(cls):
        return cls("sort_ascending_by_size")

    @classmethod
    def sort_descending_by_size(cls):
        return cls("sort_descending_by_size")

    @classmethod
    def by_external_key(cls, key_name: str):
        return cls("by_external_key", key_name=key_name)


class Chunked(list):
    """An ordered list carrying chunk boundaries as an overlay.

    ``boundaries`` holds the indices after which a chunk ends, internal cut
    points only (the end of the list is not a boundary).
    """

    def __init__(self, items, boundaries):
        super().__init__(items)
        self.boundaries = list(boundaries)


def _size_of(element):
    for attr in ("payload_size", "size"):
        value = getattr(element, attr, None)
        if value is not None:
            return value
    raise TypeError("element %r has no size to sort by" % (element,))


def organize(elements, spec: OrgSpec, keys=None):
    """Rearrange an ordered collection, or overlay chunk boundaries on it.

    Sorts are stable: ties keep input order.  ``keys`` optionally maps
    elements to their external key; otherwise the key is read off the
    element attribute named by the spec.
    """
    items = list(elements)
    if spec.variant == "identity":
        return items
    if spec.variant == "constant_chunk":
        n = spec.chunk_size
        cuts = [k * n - 1 for k in range(1, ceil(len(items) / n))]
        return Chunked(items, cuts)
    if spec.variant == "sort_ascending_by_size":
        return sorted(items, key=_size_of)
    if spec.variant == "sort_descending_by_size":
        return sorted(items, key=_size_of, reverse=True)
    # by_external_key
    def key_of(element):
        if keys is not None and element in keys:
            return keys[element]
        value = getattr(element, spec.key_name, None)
        if value is None:
            raise MissingKey("no %r key for element %r" % (spec.key_name, element))
        return value
    return sorted(items, key=key_of)


def select(collection, i: int):
    """The i-th member of an ordered collection, 1-based."""
    if not 1 <= i <= len(collection):
        raise IndexOutOfRange(
            "index %d outside 1..%d" % (i, len(collection)))
    return collection[i - 1]


def enumerate_pool(pool: ResourcePool, universe=None) -> ResourcePool:
    """Associate an address with every pool element; idempotent.

    Only the identity enumeration over the naturals is implemented: finite
    pools get 0..capacity-1, infinite pools issue naturals on demand.  A
    universe may be passed to assert it is large enough.
    """
    if universe is None:
        return pool
    if pool.finite:
        names = list(universe)
        if len(names) < pool.capacity:
            raise UniverseTooSmall(
                "universe of %d names cannot enumerate %d elements"
                % (len(names), pool.capacity))
        if names[:pool.capacity] != list(range(pool.capacity)):
            raise ValueError("only the identity enumeration is supported")
    return pool


# ---------------------------------------------------------------------------
# carving and release


def make_set(pool: ResourcePool, r: int) -> Region:
    """Carve the first-fit contiguous region of size r from the free ledger.

    Scans free runs in ascending address order; infinite pools fall back to
    minting fresh addresses and never fail.  The region moves to the
    occupied ledger atomically.
    """
    if r < 1:
        raise ValueError("region size must be >= 1")
    for idx, run in enumerate(pool.free):
        if run.size >= r:
            carved = Region(pool.kind, run.u_min, run.u_min + r - 1)
            if run.size == r:
                del pool.free[idx]
            else:
                pool.free[idx] = Region(pool.kind, run.u_min + r, run.u_max)
            pool.occupied.append(carved)
            return carved
    if not pool.finite:
        carved = Region(pool.kind, pool.next_fresh, pool.next_fresh + r - 1)
        pool.next_fresh += r
        pool.occupied.append(carved)
        return carved
    if pool.total_free >= r:
        raise NoContiguousRun(
            "%d elements free but no contiguous run of %d" % (pool.total_free, r))
    raise Exhausted(
        "need %d elements, %d free" % (r, pool.total_free))


def make_spec_set(target, u_min: int, u_max: int) -> Region:
    """The exact span [u_min..u_max] of a pool, a region, or a procedure.

    On a pool the span must be entirely free and moves to the occupied
    ledger.  On a region or a procedure this is a pure slice (bounds are
    offsets into the target) with no ledger effect.
    """
    if u_min < 0 or u_max < u_min:
        raise ValueError("invalid span [%r..%r]" % (u_min, u_max))
    if isinstance(target, ResourcePool):
        return _carve_specific(target, u_min, u_max)
    if isinstance(target, Region):
        if u_max >= target.size:
            raise SpanOutOfBounds(
                "offsets [%d..%d] outside region %s" % (u_min, u_max, target))
        return Region(target.kind, target.u_min + u_min, target.u_min + u_max)
    size = target if isinstance(target, int) else getattr(target, "payload_size", None)
    if size is None:
        raise TypeError("cannot slice %r" % (target,))
    if u_max >= size:
        raise SpanOutOfBounds(
            "offsets [%d..%d] outside address space of size %d" % (u_min, u_max, size))
    return Region(ResourceKind.PROCEDURE, u_min, u_max)


def _carve_specific(pool: ResourcePool, u_min: int, u_max: int) -> Region:
    if not pool.finite:
        raise ValueError("specific spans require a finite pool")
    if u_max >= pool.capacity:
        raise SpanOutOfBounds(
            "span [%d..%d] outside capacity %d" % (u_min, u_max, pool.capacity))
    for idx, run in enumerate(pool.free):
        if run.u_min <= u_min and u_max <= run.u_max:
            carved = Region(pool.kind, u_min, u_max)
            pieces = []
            if run.u_min < u_min:
                pieces.append(Region(pool.kind, run.u_min, u_min - 1))
            if u_max < run.u_max:
                pieces.append(Region(pool.kind, u_max + 1, run.u_max))
            pool.free[idx:idx + 1] = pieces
            pool.occupied.append(carved)
            return carved
    raise SpanNotFree("span [%d..%d] is not entirely free" % (u_min, u_max))


def release_set(pool: ResourcePool, binding, table) -> None:
    """Return a bound region to the free ledger and drop the binding.

    Consumable pools (time) reject this; the freed run coalesces with
    adjacent free runs.
    """
    if not pool.reusable:
        raise ConsumableResource(
            "%s pool elements cannot be released" % pool.kind.value)
    if binding not in table:
        raise UnknownBinding("binding %r is not in the table" % (binding,))
    region = binding.right
    if not isinstance(region, Region) or region.kind is not pool.kind:
        raise UnknownBinding(
            "binding's right side %r is not a region of this pool" % (region,))
    pool.reclaim(region)
    table.remove(binding)


# ---------------------------------------------------------------------------
# audit


@dataclass
class AuditReport:
    """Outcome of checking the four partition invariants on one pool."""

    checked_pool: ResourceKind
    total_ok: bool
    exclusivity_ok: bool
    union_ok: bool
    disjoint_ok: bool
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.total_ok and self.exclusivity_ok
                and self.union_ok and self.disjoint_ok)


def audit_partition(pool: ResourcePool) -> AuditReport:
    """Evaluate the four partition invariants literally and report violations.

    For finite pools the universe is 0..capacity-1; for infinite pools it is
    the issued prefix 0..next_fresh-1.  A failing audit is a report, not an
    error.
    """
    universe = pool.capacity if pool.finite else pool.next_fresh
    entries = [(r, "free") for r in pool.free]
    entries += [(r, "occupied") for r in pool.occupied]
    total_v, excl_v, union_v, disjoint_v = [], [], [], []

    total = sum(r.size for r, _ in entries)
    if total != universe:
        total_v.append("ledger sizes sum to %d, expected %d" % (total, universe))

    entries.sort(key=lambda e: (e[0].u_min, e[0].u_max))
    max_end = -1
    max_reg = None
    max_side = None
    for reg, side in entries:
        if reg.u_max >= universe:
            union_v.append("%s region %s outside universe 0..%d"
                           % (side, reg, universe - 1))
        if max_reg is not None and reg.u_min <= max_end:
            disjoint_v.append("%s region %s overlaps %s region %s"
                              % (side, reg, max_side, max_reg))
            if side != max_side:
                excl_v.append("addresses in both ledgers: %s (%s) and %s (%s)"
                              % (max_reg, max_side, reg, side))
        if reg.u_min > max_end + 1:
            union_v.append("addresses %d..%d in neither ledger"
                           % (max_end + 1, reg.u_min - 1))
        if reg.u_max > max_end:
            max_end = reg.u_max
            max_reg = reg
            max_side = side
    if max_end < universe - 1:
        union_v.append("addresses %d..%d in neither ledger"
                       % (max_end + 1, universe - 1))

    return AuditReport(
        checked_pool=pool.kind,
        total_ok=not total_v,
        exclusivity_ok=not excl_v,
        union_ok=not union_v,
        disjoint_ok=not disjoint_v,
        violations=total_v + excl_v + union_v + disjoint_v,
    )
