"""Core value types: topology, states, ground actions and plans.

Angles are plain ``int`` degrees in ``[0, 360)``.  Elements carrying an angle
are joints ``1..n`` in the simple scenario and links ``1..n`` in the extended
one; a state stores them positionally (element ``e`` at index ``e - 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence


class Scenario(str, Enum):
    """Action model.  ``SAS`` instances use the simple fact shape, the two
    extended models share the ``connected``/gripper shape."""

    SAS = "sas"
    SAES = "saes"
    MAES = "maes"

    @property
    def extended(self) -> bool:
        return self is not Scenario.SAS

    def __str__(self) -> str:
        return self.value


def normalize_angle(raw: int) -> int:
    """Fold an integer angle into ``[0, 360)``."""
    return raw % 360


def one_step(target: int, current: int, granularity: int) -> bool:
    """True when ``target`` is reachable from ``current`` by one rotation of
    ``granularity`` degrees, wrapping around 0/360."""
    if target == current:
        return False
    return abs(target - current) in (granularity, 360 - granularity)


def step_distance(a: int, b: int, granularity: int) -> int:
    """Minimum number of single-granularity rotations turning ``a`` into ``b``."""
    k = ((b - a) % 360) // granularity
    return min(k, 360 // granularity - k)


def grid(granularity: int) -> tuple[int, ...]:
    return tuple(range(0, 360, granularity))


@dataclass(frozen=True)
class Topology:
    """Static description of an articulated object.

    ``adjacency`` holds ``isLinked`` pairs (symmetric, including the hidden
    ``(0, 1)`` reference link) for SAS and ``(joint, link)`` pairs of the
    ``connected`` relation for the extended scenarios.
    """

    scenario: Scenario
    num_links: int
    num_joints: int
    granularity_deg: int
    adjacency: frozenset[tuple[int, int]]
    link_lengths: tuple[float, ...] = ()
    grippers: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.num_links < 1:
            raise ValueError("an articulated object needs at least one link")
        if self.granularity_deg <= 0 or 360 % self.granularity_deg:
            raise ValueError(f"granularity {self.granularity_deg} does not divide 360")
        if not self.link_lengths:
            object.__setattr__(self, "link_lengths", (1.0,) * self.num_elements)
        if len(self.link_lengths) != self.num_elements:
            raise ValueError("one length per link is required")
        if any(length <= 0 for length in self.link_lengths):
            raise ValueError("link lengths must be strictly positive")

    @classmethod
    def chain(
        cls,
        scenario: Scenario,
        n: int,
        granularity: int,
        grippers: Sequence[int] = (1, 2),
        link_lengths: Sequence[float] = (),
    ) -> Topology:
        """Standard serial chain with ``n`` angle-carrying elements."""
        scenario = Scenario(scenario)
        if scenario is Scenario.SAS:
            pairs = {(j, j + 1) for j in range(0, n)}
            adjacency = frozenset(pairs | {(b, a) for a, b in pairs})
            return cls(scenario, n, n, granularity, adjacency, tuple(link_lengths))
        adjacency = frozenset(
            {(j, j) for j in range(1, n)} | {(j, j + 1) for j in range(1, n)}
        )
        return cls(
            scenario, n, n - 1, granularity, adjacency, tuple(link_lengths), tuple(grippers)
        )

    @property
    def num_elements(self) -> int:
        return self.num_joints if self.scenario is Scenario.SAS else self.num_links

    @property
    def elements(self) -> range:
        return range(1, self.num_elements + 1)

    @property
    def joints(self) -> range:
        # joint 0 is the hidden SAS reference
        start = 0 if self.scenario is Scenario.SAS else 1
        return range(start, self.num_joints + 1)

    @property
    def links(self) -> range:
        return range(1, self.num_links + 1)

    @property
    def angles(self) -> tuple[int, ...]:
        return grid(self.granularity_deg)

    @property
    def orientations(self) -> int:
        return 360 // self.granularity_deg

    def is_linked(self, a: int, b: int) -> bool:
        return (a, b) in self.adjacency

    def connected(self, joint: int, link: int) -> bool:
        return (joint, link) in self.adjacency

    def joint_links(self, joint: int) -> tuple[int, ...]:
        return tuple(sorted(l for j, l in self.adjacency if j == joint))

    @property
    def is_standard_chain(self) -> bool:
        return self == replace(
            Topology.chain(self.scenario, self.num_elements, self.granularity_deg, self.grippers),
            link_lengths=self.link_lengths,
        )

    def with_scenario(self, scenario: Scenario) -> Topology:
        return replace(self, scenario=Scenario(scenario))


@dataclass(frozen=True)
class State:
    """Fluent valuation at one timestep.

    ``grasped`` is a sorted tuple of ``(gripper, link)`` pairs.  Simple
    scenario states leave every gripper fluent empty.
    """

    angles: tuple[int, ...]
    in_hand: frozenset[int] = frozenset()
    grasped: tuple[tuple[int, int], ...] = ()
    free: frozenset[int] = frozenset()
    in_centre: int | None = None

    def angle(self, element: int) -> int:
        return self.angles[element - 1]

    def angle_map(self) -> dict[int, int]:
        return {i + 1: a for i, a in enumerate(self.angles)}

    def with_angles(self, angles: Iterable[int]) -> State:
        return replace(self, angles=tuple(angles))

    def gripper_of(self, link: int) -> int | None:
        for g, l in self.grasped:
            if l == link:
                return g
        return None

    def satisfies(self, goals: Mapping[int, int]) -> bool:
        angles = self.angles
        n = len(angles)
        return all(0 < e <= n and angles[e - 1] == a for e, a in goals.items())

    def invariant_errors(self, grippers: Iterable[int] = ()) -> list[str]:
        """Violations of the gripper bookkeeping invariants (empty if sound)."""
        errors = []
        holding = {g for g, _ in self.grasped}
        for g in grippers:
            if (g in self.free) == (g in holding):
                errors.append(f"gripper {g} must be either free or grasping")
        if len(holding) != len(self.grasped):
            errors.append("a gripper grasps more than one link")
        if self.in_hand != {l for _, l in self.grasped}:
            errors.append("in_hand differs from the grasped links")
        return errors


@dataclass(frozen=True, order=True)
class GroundAction:
    """A named operator instance at ``timestep``; ``args`` follow the atom's
    argument order, without the trailing timestep."""

    name: str
    args: tuple[int, ...]
    timestep: int = 0

    def __str__(self) -> str:
        return f"{self.name}({','.join(str(a) for a in (*self.args, self.timestep))})"

    def at(self, timestep: int) -> GroundAction:
        return replace(self, timestep=timestep)


@dataclass(frozen=True)
class Plan:
    """Sequential plan: exactly one action per timestep ``0..len-1``."""

    actions: tuple[GroundAction, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for i, action in enumerate(self.actions):
            if action.timestep != i:
                raise ValueError(
                    f"action {action} sits at timestep {action.timestep}, expected {i}"
                )

    @classmethod
    def of(cls, actions: Iterable[GroundAction | tuple]) -> Plan:
        """Build a plan from actions in order, renumbering timesteps."""
        out = []
        for i, a in enumerate(actions):
            if not isinstance(a, GroundAction):
                a = GroundAction(a.name, tuple(a))
            out.append(a.at(i))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[GroundAction]:
        return iter(self.actions)

    def __getitem__(self, i: int) -> GroundAction:
        return self.actions[i]


def to_relative(config: State | Sequence[int]) -> tuple[int, ...]:
    """Absolute orientations to angles relative to the previous element.

    The first entry is relative to the hidden reference (orientation 0), so
    it equals the first absolute angle.
    """
    angles = config.angles if isinstance(config, State) else tuple(config)
    prev = 0
    out = []
    for a in angles:
        out.append(normalize_angle(a - prev))
        prev = a
    return tuple(out)


def to_absolute(relative: Sequence[int]) -> tuple[int, ...]:
    total = 0
    out = []
    for r in relative:
        total = normalize_angle(total + r)
        out.append(total)
    return tuple(out)


def shift_angles(
    angles: tuple[int, ...], rotated: int, held: int, target: int, current: int
) -> tuple[int, ...]:
    """Angles after rotating element ``rotated`` from ``current`` to ``target``
    while ``held`` stays fixed.

    Elements on the far side of ``rotated`` (higher ids when ``rotated >
    held``, lower ids otherwise) follow with the same delta.
    """
    delta = target - current
    out = list(angles)
    out[rotated - 1] = target
    if rotated > held:
        far = range(rotated, len(out))
    else:
        far = range(0, rotated - 1)
    for i in far:
        out[i] = normalize_angle(out[i] + delta)
    return tuple(out)
