"""Segmentation over virtual memory followed by paging over physical memory.

The pipeline: read off a procedure's segment data, slice the procedure into
segments, carve matching virtual segments, bind the two into a segment
table; then slice each virtual segment into pages, carve page-size frames
from physical memory, and bind pages to frames in a page table.  Framing is
independent of the procedures and may be hoisted in front of the whole
loop, in which case pages draw the first free pre-carved frame.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil

from .bindings import bind
from .errors import AddressOutOfRange, Exhausted, TableIncomplete
from .pools import (
    OrgSpec,
    Region,
    ResourcePool,
    audit_partition,
    make_set,
    make_spec_set,
    organize,
    select,
)
from .procedures import Procedure


@dataclass(frozen=True)
class SegRow:
    seg_index: int
    proc_span: Region
    vm_span: Region


@dataclass(frozen=True)
class SegmentTable:
    """Binds a procedure's segments to virtual memory segments, row-wise."""

    owner: str
    rows: tuple[SegRow, ...]


@dataclass(frozen=True)
class PageRow:
    page_index: int
    vm_span: Region
    frame: Region


@dataclass(frozen=True)
class PageTable:
    """Binds the pages of one virtual segment to physical frames."""

    owner: tuple[str, int] | None
    rows: tuple[PageRow, ...]


@dataclass(frozen=True)
class PagingConfig:
    """Pool sizes and page size for a paged-segmentation run.

    Virtual memory is typically at least as large as physical memory here;
    physical capacity must be a multiple of the page size so framing leaves
    no unframeable residue.
    """

    page_size: int
    vm_capacity: int
    phys_capacity: int
    hoist_frames: bool = False

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page size must be >= 1")
        if self.vm_capacity < 1 or self.phys_capacity < 1:
            raise ValueError("capacities must be >= 1")
        if self.phys_capacity % self.page_size != 0:
            raise ValueError(
                "physical capacity %d is not a multiple of page size %d"
                % (self.phys_capacity, self.page_size))

    def build_pools(self) -> tuple[ResourcePool, ResourcePool]:
        return (ResourcePool.virtual_memory(self.vm_capacity),
                ResourcePool.memory(self.phys_capacity))


def get_segs_data(proc: Procedure) -> tuple[int, tuple[int, ...]]:
    """Number of segments and their start-offset boundaries."""
    return proc.k, proc.seg_boundaries


def proc_segs(proc: Procedure, segdata=None) -> list[Region]:
    """Slice a procedure into its segments; pure, offsets within the
    procedure."""
    k, bounds = segdata or get_segs_data(proc)
    return [make_spec_set(proc, bounds[i], bounds[i + 1] - 1)
            for i in range(k)]


def make_segs(vm: ResourcePool, segdata) -> list[Region]:
    """Carve one virtual region per segment size, first-fit.

    Rolls its own carves back on failure and reports the failing segment
    index (1-based).
    """
    k, bounds = segdata
    snap = vm.snapshot()
    regions = []
    for i in range(k):
        size = bounds[i + 1] - bounds[i]
        try:
            if vm.total_free < size:
                raise Exhausted("need %d elements, %d free" % (size, vm.total_free))
            regions.append(make_set(vm, size))
        except Exhausted as exc:
            vm.restore(snap)
            exc.segment_index = i + 1
            raise
    return regions


def seg_tab(vm: ResourcePool, proc: Procedure, segdata=None) -> SegmentTable:
    """Build the segment table binding procedure segments to virtual ones.

    Both segment lists are fully computed before any row is bound; no
    partial table survives a failure.
    """
    segdata = segdata or get_segs_data(proc)
    ps = proc_segs(proc, segdata)
    vs = make_segs(vm, segdata)
    rows = []
    for i in range(1, segdata[0] + 1):
        pair = bind(select(ps, i), select(vs, i))
        rows.append(SegRow(i, pair.left, pair.right))
    return SegmentTable(proc.name, tuple(rows))


def make_page(segment: Region, page_size: int) -> list[Region]:
    """Slice a virtual segment into ceil(size/g) pages; pure.

    Every page has size g except possibly the last, which takes the
    remainder.
    """
    if page_size < 1:
        raise ValueError("page size must be >= 1")
    count = ceil(segment.size / page_size)
    return [make_spec_set(segment, i * page_size,
                          min((i + 1) * page_size, segment.size) - 1)
            for i in range(count)]


def make_frame(phys: ResourcePool, page_size: int, count: int) -> list[Region]:
    """Carve ``count`` frames of exactly the page size from physical memory.

    Rolls back on failure, reporting how many frames had been obtained.
    """
    snap = phys.snapshot()
    frames = []
    for i in range(count):
        try:
            if phys.total_free < page_size:
                raise Exhausted(
                    "need %d elements, %d free" % (page_size, phys.total_free))
            frames.append(make_set(phys, page_size))
        except Exhausted as exc:
            phys.restore(snap)
            exc.frames_obtained = i
            raise
    return frames


def page_tab(phys: ResourcePool, segment: Region, page_size: int,
             frame_source: deque | None = None,
             owner: tuple[str, int] | None = None) -> PageTable:
    """Build the page table binding a segment's pages to frames.

    Pages and frames are both computed before any binding.  With no
    ``frame_source`` the frames are carved fresh and bound positionally;
    with one (hoisted framing) each page takes the first free pre-carved
    frame.
    """
    pages = make_page(segment, page_size)
    if frame_source is None:
        frames = make_frame(phys, page_size, len(pages))
    else:
        if len(frame_source) < len(pages):
            raise Exhausted(
                "free-frame list holds %d frames, %d pages need binding"
                % (len(frame_source), len(pages)),
                frames_obtained=len(frame_source))
        frames = [frame_source.popleft() for _ in pages]
    rows = []
    for i in range(1, len(pages) + 1):
        pair = bind(select(pages, i), select(frames, i))
        rows.append(PageRow(i, pair.left, pair.right))
    return PageTable(owner, tuple(rows))


def total_frame_demand(procs, page_size: int) -> int:
    return sum(ceil(size / page_size)
               for p in procs for size in p.segment_sizes)


def do_page_seg(procs, vm: ResourcePool, phys: ResourcePool, page_size: int,
                hoist_frames: bool = False, order: OrgSpec | None = None,
                ) -> tuple[list[SegmentTable], list[PageTable]]:
    """Run the whole pipeline over every procedure, in the given order.

    Per procedure: segment data, segment table, then a page table per
    virtual segment.  With ``hoist_frames`` the framing of physical memory
    runs once, up front, for the entire demand.  A failure rolls back the
    failing procedure completely (its frames rejoin the free-frame list in
    hoisted mode) and propagates.
    """
    for pool in (vm, phys):
        report = audit_partition(pool)
        if not report.passed:
            raise ValueError("%s pool failed audit: %s"
                             % (pool.kind.value, "; ".join(report.violations)))
    ordered = organize(list(procs), order or OrgSpec.identity())
    free_frames = None
    if hoist_frames:
        free_frames = deque(make_frame(phys, page_size,
                                       total_frame_demand(ordered, page_size)))
    seg_tables: list[SegmentTable] = []
    page_tables: list[PageTable] = []
    for proc in ordered:
        vm_snap = vm.snapshot()
        phys_snap = phys.snapshot()
        frames_snap = tuple(free_frames) if free_frames is not None else None
        try:
            segdata = get_segs_data(proc)
            st = seg_tab(vm, proc, segdata)
            tables = []
            for row in st.rows:
                tables.append(page_tab(phys, row.vm_span, page_size,
                                       frame_source=free_frames,
                                       owner=(proc.name, row.seg_index)))
        except Exhausted as exc:
            vm.restore(vm_snap)
            phys.restore(phys_snap)
            if free_frames is not None:
                free_frames.clear()
                free_frames.extend(frames_snap)
            exc.procedure = proc.name
            raise
        seg_tables.append(st)
        page_tables.extend(tables)
    return seg_tables, page_tables


def translate(proc: Procedure, logical_addr: int, seg_tables, page_tables) -> int:
    """Physical address for a procedure-local logical address.

    Locates the segment row containing the address, maps into the virtual
    segment, then the page row containing that virtual address, and maps
    into the frame.  Total on 0 <= addr < payload size when the tables are
    complete.
    """
    if not 0 <= logical_addr < proc.payload_size:
        raise AddressOutOfRange(
            "address %d outside 0..%d" % (logical_addr, proc.payload_size - 1))
    st = next((t for t in seg_tables if t.owner == proc.name), None)
    if st is None:
        raise TableIncomplete("no segment table for %s" % proc.name)
    row = next((r for r in st.rows if r.proc_span.contains(logical_addr)), None)
    if row is None:
        raise TableIncomplete(
            "no segment of %s holds address %d" % (proc.name, logical_addr))
    vm_addr = row.vm_span.u_min + (logical_addr - row.proc_span.u_min)
    pt = next((t for t in page_tables
               if t.owner == (proc.name, row.seg_index)), None)
    if pt is None:
        raise TableIncomplete(
            "no page table for segment %d of %s" % (row.seg_index, proc.name))
    prow = next((r for r in pt.rows if r.vm_span.contains(vm_addr)), None)
    if prow is None:
        raise TableIncomplete(
            "no page of %s segment %d holds vm address %d"
            % (proc.name, row.seg_index, vm_addr))
    return prow.frame.u_min + (vm_addr - prow.vm_span.u_min)


def serialize_tables(seg_tables, page_tables) -> str:
    """Machine format: one tab-separated row per line, construction order."""
    lines = []
    for st in seg_tables:
        for row in st.rows:
            lines.append("SEG\t%s\t%d\t%d\t%d\t%d\t%d" % (
                st.owner, row.seg_index,
                row.proc_span.u_min, row.proc_span.u_max,
                row.vm_span.u_min, row.vm_span.u_max))
    for pt in page_tables:
        owner, seg_index = pt.owner if pt.owner else ("?", 0)
        for row in pt.rows:
            lines.append("PAGE\t%s\t%d\t%d\t%d\t%d\t%d\t%d" % (
                owner, seg_index, row.page_index,
                row.vm_span.u_min, row.vm_span.u_max,
                row.frame.u_min, row.frame.u_max))
    return "\n".join(lines) + "\n" if lines else ""
