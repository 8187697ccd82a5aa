"""Exception types shared across the package."""


class OSModelError(Exception):
    """Base class for every error this package raises deliberately."""


# --- pool construction and carving ---------------------------------------

class UniverseTooSmall(OSModelError):
    """The enumeration universe has fewer names than the pool has elements."""


class Exhausted(OSModelError):
    """Not enough free resource to satisfy a request.

    Optional context set by callers: ``procedure`` (name of the procedure the
    batch was working on), ``segment_index``, ``frames_obtained`` and
    ``phase`` (workload phase label).
    """

    def __init__(self, message, *, procedure=None, segment_index=None,
                 frames_obtained=None):
        super().__init__(message)
        self.procedure = procedure
        self.segment_index = segment_index
        self.frames_obtained = frames_obtained
        self.phase = None


class NoContiguousRun(Exhausted):
    """Total free space would suffice but no contiguous run is long enough."""


class SpanNotFree(OSModelError):
    """A specifically requested span is not entirely inside the free ledger."""


class SpanOutOfBounds(OSModelError):
    """A specifically requested span lies outside the addressable set."""


class ConsumableResource(OSModelError):
    """Release attempted on a pool whose elements can be used only once."""


class UnknownBinding(OSModelError):
    """The binding to release is not present in the given table."""


# --- ordering and selection -----------------------------------------------

class IndexOutOfRange(OSModelError):
    """1-based selection index outside the collection."""


class MissingKey(OSModelError):
    """External-key ordering found an element without a key."""


# --- bindings and naming ----------------------------------------------------

class InadmissiblePair(OSModelError):
    """The two values cannot be bound together (closed tag set)."""


class DuplicateEntry(OSModelError):
    """Exact duplicate entry appended to a binding table."""


class RightSideTaken(OSModelError):
    """One-to-one table already binds that right-side value."""


class NotFound(OSModelError):
    """Entry to remove is not in the table."""


class NamesExhausted(OSModelError):
    """Unique naming ran out of available names."""


# --- allocation -------------------------------------------------------------

class ShrinkBelowZero(OSModelError):
    """Shrink request exceeds the procedure's currently bound size."""


class NotBound(OSModelError):
    """The procedure holds no binding in the table."""


# --- scheduling -------------------------------------------------------------

class MissingPriority(OSModelError):
    """Priority policy used with a procedure that carries no priority."""


class NotCurrent(OSModelError):
    """close applied to a procedure that is not the current one."""


class NoClosure(OSModelError):
    """schedule applied to a procedure with no stored closure."""


# --- address translation -----------------------------------------------------

class AddressOutOfRange(OSModelError):
    """Logical address outside the procedure's address space."""


class TableIncomplete(OSModelError):
    """Segment or page tables do not cover the requested address."""


# --- workload ingestion and runs ---------------------------------------------

class ParseError(OSModelError):
    """Workload text is syntactically malformed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class ValidationError(OSModelError):
    """Workload is well-formed but violates a domain invariant."""


class AuditFailed(OSModelError):
    """An internal partition audit reported violations during a run."""
