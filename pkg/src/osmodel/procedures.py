"""Procedures: named finite address spaces with time and growth metadata."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class GrowthEvent:
    """A memory-requirement change of ``delta`` units once ``at_tick``
    of the owning procedure's time has been consumed."""

    at_tick: int
    delta: int


@dataclass(frozen=True)
class Procedure:
    """A named set of naturals with spatial and temporal cardinalities.

    ``payload_size`` is the number of memory units, ``declared_time`` the
    (estimated, in general undecidable) number of time units.  Segment
    boundaries are start offsets 0 = a_1 < ... < a_{k+1} = payload_size;
    omitted boundaries default to a single segment.
    """

    name: str
    payload_size: int
    declared_time: int = 1
    seg_boundaries: tuple[int, ...] = ()
    priority: int | None = None
    growth_schedule: tuple[GrowthEvent, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("procedure needs a name")
        if self.payload_size < 1:
            raise ValueError("payload_size must be >= 1")
        if self.declared_time < 1:
            raise ValueError("declared_time must be >= 1")
        bounds = tuple(self.seg_boundaries) or (0, self.payload_size)
        object.__setattr__(self, "seg_boundaries", bounds)
        if bounds[0] != 0 or bounds[-1] != self.payload_size:
            raise ValueError(
                "segment boundaries must start at 0 and end at %d, got %r"
                % (self.payload_size, bounds))
        if any(a >= b for a, b in zip(bounds, bounds[1:])):
            raise ValueError("segment boundaries must be strictly increasing")
        object.__setattr__(self, "growth_schedule", tuple(self.growth_schedule))
        self._check_growth()

    def _check_growth(self):
        running = self.payload_size
        last_tick = 0
        for event in self.growth_schedule:
            if not 1 <= event.at_tick <= self.declared_time - 1:
                raise ValueError(
                    "growth tick %d outside 1..%d"
                    % (event.at_tick, self.declared_time - 1))
            if event.at_tick < last_tick:
                raise ValueError("growth events must be ordered by tick")
            last_tick = event.at_tick
            running += event.delta
            if running < 1:
                raise ValueError(
                    "growth schedule drops size below 1 at tick %d" % event.at_tick)

    @property
    def k(self) -> int:
        """Number of segments."""
        return len(self.seg_boundaries) - 1

    @property
    def segment_sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in
                     zip(self.seg_boundaries, self.seg_boundaries[1:]))

    def __str__(self):
        return self.name
