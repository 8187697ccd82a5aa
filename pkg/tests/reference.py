"""Hand-rolled reference implementations used as independent test oracles.

Nothing in this module imports the package under test.  Everything here is
written in the most boring way possible (bump pointers, per-address sets,
explicit queues) so that agreement with the library is meaningful.
"""

from collections import deque
from math import ceil


# ---------------------------------------------------------------------------
# per-address ownership oracle for pool partitioning


def first_fit_start(free_addrs, r):
    """Lowest start of a run of r consecutive free addresses, or None."""
    run_start = None
    run_len = 0
    prev = None
    for a in sorted(free_addrs):
        if prev is not None and a == prev + 1:
            run_len += 1
        else:
            run_start = a
            run_len = 1
        prev = a
        if run_len >= r:
            return run_start
    return None


class OwnershipOracle:
    """Tracks which ledger owns every address of a finite pool."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.free = set(range(capacity))
        self.occupied = set()

    def occupy(self, lo, hi):
        addrs = set(range(lo, hi + 1))
        assert addrs <= self.free, "oracle: span not entirely free"
        self.free -= addrs
        self.occupied |= addrs

    def release(self, lo, hi):
        addrs = set(range(lo, hi + 1))
        assert addrs <= self.occupied, "oracle: span not entirely occupied"
        self.occupied -= addrs
        self.free |= addrs

    def expected_first_fit(self, r):
        return first_fit_start(self.free, r)


# ---------------------------------------------------------------------------
# bump-pointer paging/segmentation reference
#
# On fresh pools every first-fit choice is the low watermark, so the whole
# pipeline reduces to two bump pointers.  Procedures are plain tuples
# (name, size, boundaries) where boundaries = (0, ..., size).


def ref_page_seg(procs, vm_capacity, phys_capacity, page_size):
    """Returns (seg_rows, page_rows) of plain int tuples.

    seg_rows:  (name, seg_index, proc_lo, proc_hi, vm_lo, vm_hi)
    page_rows: (name, seg_index, page_index, vm_lo, vm_hi, frame_lo, frame_hi)
    """
    g = page_size
    vm_ptr = 0
    phys_ptr = 0
    seg_rows = []
    page_rows = []
    for name, size, boundaries in procs:
        assert boundaries[0] == 0 and boundaries[-1] == size
        for i in range(len(boundaries) - 1):
            a, b = boundaries[i], boundaries[i + 1]
            seg_size = b - a
            if vm_ptr + seg_size > vm_capacity:
                raise RuntimeError("reference: virtual memory exhausted")
            vm_lo = vm_ptr
            vm_ptr += seg_size
            seg_rows.append((name, i + 1, a, b - 1, vm_lo, vm_lo + seg_size - 1))
            for j in range(ceil(seg_size / g)):
                off_lo = j * g
                off_hi = min((j + 1) * g, seg_size) - 1
                if phys_ptr + g > phys_capacity:
                    raise RuntimeError("reference: physical memory exhausted")
                frame_lo = phys_ptr
                phys_ptr += g
                page_rows.append((name, i + 1, j + 1,
                                  vm_lo + off_lo, vm_lo + off_hi,
                                  frame_lo, frame_lo + g - 1))
    return seg_rows, page_rows


def ref_serialize(seg_rows, page_rows):
    lines = ["SEG\t%s\t%d\t%d\t%d\t%d\t%d" % row for row in seg_rows]
    lines += ["PAGE\t%s\t%d\t%d\t%d\t%d\t%d\t%d" % row for row in page_rows]
    return "\n".join(lines) + "\n" if lines else ""


def ref_translate(seg_rows, page_rows, name, addr):
    """Physical address of a logical one, straight off the reference rows."""
    for row in seg_rows:
        if row[0] == name and row[2] <= addr <= row[3]:
            seg_index = row[1]
            vm_addr = row[4] + (addr - row[2])
            break
    else:
        raise KeyError("no segment holds address %d of %s" % (addr, name))
    for row in page_rows:
        if row[0] == name and row[1] == seg_index and row[3] <= vm_addr <= row[4]:
            return row[5] + (vm_addr - row[3])
    raise KeyError("no page holds vm address %d of %s" % (vm_addr, name))


# ---------------------------------------------------------------------------
# scheduling plan references
#
# Jobs are tuples (name, time) or (name, time, priority).  Plans are lists of
# (name, slice_length).


def ref_fcfs(jobs):
    return [(j[0], j[1]) for j in jobs]


def ref_sjf(jobs):
    order = sorted(range(len(jobs)), key=lambda i: (jobs[i][1], i))
    return [(jobs[i][0], jobs[i][1]) for i in order]


def ref_priority(jobs):
    order = sorted(range(len(jobs)), key=lambda i: (jobs[i][2], i))
    return [(jobs[i][0], jobs[i][1]) for i in order]


def ref_round_robin(jobs, quantum):
    queue = deque([[j[0], j[1]] for j in jobs])
    plan = []
    while queue:
        name, left = queue.popleft()
        s = min(quantum, left)
        plan.append((name, s))
        left -= s
        if left > 0:
            queue.append([name, left])
    return plan
