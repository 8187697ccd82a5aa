"""Pair and list primitives, and the naming predicate gluing resources to
procedures."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateEntry,
    InadmissiblePair,
    NamesExhausted,
    NotFound,
    RightSideTaken,
)
from .pools import Region, ResourceKind
from .procedures import Procedure

ONE_TO_ONE = "one_to_one"
MANY_TO_ONE = "many_to_one"

_SPAN_TAGS = {
    ResourceKind.MEMORY: "memory-span",
    ResourceKind.VIRTUAL_MEMORY: "vmem-span",
    ResourceKind.TIME: "interval",
    ResourceKind.NAMES: "name-span",
    ResourceKind.PROCEDURE: "procedure-span",
}

# procedures bind to carved pool subsets or names; procedure segments bind
# to virtual segments; virtual pages bind to physical frames
_ADMISSIBLE = {
    ("procedure", "memory-span"),
    ("procedure", "vmem-span"),
    ("procedure", "interval"),
    ("procedure", "name"),
    ("procedure-span", "vmem-span"),
    ("vmem-span", "memory-span"),
}


def value_tag(value) -> str:
    if isinstance(value, Procedure):
        return "procedure"
    if isinstance(value, Region):
        return _SPAN_TAGS[value.kind]
    if isinstance(value, (int, str)):
        return "name"
    raise InadmissiblePair("cannot tag %r for binding" % (value,))


@dataclass(frozen=True)
class Binding:
    """An ordered pair of tagged values."""

    left: object
    right: object


def bind(o1, o2) -> Binding:
    """Bind two values into a pair, if their tag combination is admissible."""
    pair = (value_tag(o1), value_tag(o2))
    if pair not in _ADMISSIBLE:
        raise InadmissiblePair("no %s -> %s bindings" % pair)
    return Binding(o1, o2)


def unbind_fst(b: Binding):
    return b.left


def unbind_snd(b: Binding):
    return b.right


class BindingTable:
    """An ordered list of bindings with a uniqueness discipline.

    One-to-one tables never repeat a right-side value; exact duplicate
    entries are rejected in either mode.
    """

    def __init__(self, uniqueness_mode: str = ONE_TO_ONE):
        if uniqueness_mode not in (ONE_TO_ONE, MANY_TO_ONE):
            raise ValueError("unknown uniqueness mode %r" % uniqueness_mode)
        self.uniqueness_mode = uniqueness_mode
        self.entries: list[Binding] = []

    def append(self, binding: Binding) -> None:
        if binding in self.entries:
            raise DuplicateEntry("entry %r already present" % (binding,))
        if self.uniqueness_mode == ONE_TO_ONE:
            if any(e.right == binding.right for e in self.entries):
                raise RightSideTaken(
                    "right side %r already bound" % (binding.right,))
        self.entries.append(binding)

    def remove(self, binding: Binding) -> None:
        try:
            self.entries.remove(binding)
        except ValueError:
            raise NotFound("entry %r not in table" % (binding,)) from None

    def replace(self, old: Binding, new: Binding) -> None:
        """Swap an entry in place, keeping its position."""
        try:
            i = self.entries.index(old)
        except ValueError:
            raise NotFound("entry %r not in table" % (old,)) from None
        if new in self.entries and new != old:
            raise DuplicateEntry("entry %r already present" % (new,))
        if self.uniqueness_mode == ONE_TO_ONE:
            if any(e.right == new.right for j, e in enumerate(self.entries)
                   if j != i):
                raise RightSideTaken("right side %r already bound" % (new.right,))
        self.entries[i] = new

    def bindings_for(self, left) -> list[Binding]:
        return [e for e in self.entries if e.left == left]

    def rights(self) -> list:
        return [e.right for e in self.entries]

    def __contains__(self, binding):
        return binding in self.entries

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "BindingTable(%s, %d entries)" % (self.uniqueness_mode, len(self))


PROCESS_IDS = "process_ids"
FILE_NAMES = "file_names"


class NamePool:
    """A storehouse of names: naturals for processes, strings for files."""

    def __init__(self, kind: str, available):
        if kind not in (PROCESS_IDS, FILE_NAMES):
            raise ValueError("unknown name pool kind %r" % kind)
        self.kind = kind
        self.available = sorted(set(available))
        self.issued: set = set()

    @classmethod
    def process_ids(cls, names) -> "NamePool":
        if isinstance(names, int):
            names = range(names)
        return cls(PROCESS_IDS, names)

    @classmethod
    def file_names(cls, names) -> "NamePool":
        return cls(FILE_NAMES, names)

    def __len__(self):
        return len(self.available)


def assign_names(procs, names: NamePool, unique: bool = True) -> BindingTable:
    """Bind the lowest available name to each procedure, in order.

    With ``unique`` every bound name is removed from the pool (one-to-one);
    otherwise names may repeat (many-to-one) and the pool is left intact.
    """
    table = BindingTable(ONE_TO_ONE if unique else MANY_TO_ONE)
    for proc in procs:
        if not names.available:
            raise NamesExhausted(
                "no name left for procedure %s" % proc)
        if unique:
            name = names.available.pop(0)
            names.issued.add(name)
        else:
            name = names.available[0]
        table.append(bind(proc, name))
    return table
