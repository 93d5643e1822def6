"""Simple scenario: one rotation operator with forward-only propagation."""

from __future__ import annotations

from typing import NamedTuple

from .domain import GroundAction, State, Topology, one_step, shift_angles


class InapplicableAction(ValueError):
    """An action whose preconditions do not hold in the given state."""


class SasAction(NamedTuple):
    rotated: int
    held: int
    target: int
    current: int

    name = "changeAngle"

    def __str__(self) -> str:
        return f"changeAngle({self.rotated},{self.held},{self.target},{self.current})"


def applicable_sas(state: State, topology: Topology) -> list[SasAction]:
    """All applicable rotations, ordered by rotated joint, held joint, target."""
    g = topology.granularity_deg
    out = []
    for j1 in topology.elements:
        current = state.angle(j1)
        targets = sorted({(current + g) % 360, (current - g) % 360} - {current})
        for j2 in range(0, j1):
            if topology.is_linked(j1, j2):
                out.extend(SasAction(j1, j2, a, current) for a in targets)
    return out


def why_inapplicable(state: State, action: SasAction, topology: Topology) -> str | None:
    j1, j2, target, current = action
    n = topology.num_elements
    if not (1 <= j1 <= n and 0 <= j2 <= n):
        return f"unknown joint in {action}"
    if not j1 > j2:
        return f"rotated joint {j1} must exceed held joint {j2}"
    if not topology.is_linked(j1, j2):
        return f"joints {j1} and {j2} are not linked"
    if target not in topology.angles:
        return f"angle {target} is not admissible"
    if state.angle(j1) != current:
        return f"joint {j1} is at {state.angle(j1)}, not {current}"
    if not one_step(target, current, topology.granularity_deg):
        return f"{current} -> {target} is not a single granularity step"
    return None


def apply_sas(state: State, action: SasAction, topology: Topology) -> State:
    """Rotate ``action.rotated``; every joint with a higher id follows."""
    action = SasAction(*action)
    reason = why_inapplicable(state, action, topology)
    if reason is not None:
        raise InapplicableAction(reason)
    return _apply_unchecked(state, action)


def _apply_unchecked(state: State, action: SasAction) -> State:
    j1, j2, target, current = action
    return State(shift_angles(state.angles, j1, j2, target, current))


def successors_sas(state: State, topology: Topology):
    for action in applicable_sas(state, topology):
        yield action, _apply_unchecked(state, action)


def from_ground(action: GroundAction) -> SasAction:
    if action.name != "changeAngle" or len(action.args) != 4:
        raise InapplicableAction(f"{action} is not a simple-scenario rotation")
    return SasAction(*action.args)
