"""Extended scenario with elementary actions: centring, grasping, rotating
and releasing links with two (or more) grippers."""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Union

from .domain import GroundAction, State, Topology, one_step, shift_angles
from .sas import InapplicableAction


class MoveLinkToCentral(NamedTuple):
    link: int
    joint: int
    gripper: int

    name = "move_link_to_central"


class TakeLinksToMove(NamedTuple):
    link1: int
    link2: int
    joint: int
    gripper1: int
    gripper2: int

    name = "take_links_to_move"


class ChangeAngle(NamedTuple):
    rotated: int
    held: int
    joint: int
    target: int
    current: int
    gripper1: int
    gripper2: int

    name = "changeAngle"


class ReleaseLinks(NamedTuple):
    link1: int
    link2: int
    joint: int
    gripper1: int
    gripper2: int

    name = "release_links"


SaesAction = Union[MoveLinkToCentral, TakeLinksToMove, ChangeAngle, ReleaseLinks]
ACTION_TYPES = {cls.name: cls for cls in (MoveLinkToCentral, TakeLinksToMove, ChangeAngle, ReleaseLinks)}


@lru_cache(maxsize=256)
def _joint_links(topology: Topology) -> dict[int, tuple[int, ...]]:
    return {j: topology.joint_links(j) for j in topology.joints}


def _pairs(values) -> list[tuple[int, int]]:
    values = sorted(values)
    return [(a, b) for a in values for b in values if a != b]


def applicable_saes(state: State, topology: Topology) -> list[SaesAction]:
    """Every applicable elementary action: moves, takes, rotations, releases,
    each group sorted by argument tuple."""
    links_of = _joint_links(topology)
    free = sorted(state.free)
    out: list[SaesAction] = []

    for joint, links in links_of.items():
        if joint == state.in_centre:
            continue
        for link in links:
            if link not in state.in_hand:
                out.extend(MoveLinkToCentral(link, joint, g) for g in free)
    out.sort()

    centre = state.in_centre
    if centre is not None:
        loose = [l for l in links_of.get(centre, ()) if l not in state.in_hand]
        grips = _pairs(free)
        out.extend(
            TakeLinksToMove(l1, l2, centre, g1, g2)
            for l1, l2 in _pairs(loose)
            for g1, g2 in grips
        )

        g = topology.granularity_deg
        holder = {l: gr for gr, l in state.grasped}
        attached = [l for l in links_of.get(centre, ()) if l in holder and l in state.in_hand]
        for l1, l2 in _pairs(attached):
            g1, g2 = holder[l1], holder[l2]
            if g1 == g2 or g1 in state.free or g2 in state.free:
                continue
            current = state.angle(l1)
            for target in sorted({(current + g) % 360, (current - g) % 360} - {current}):
                out.append(ChangeAngle(l1, l2, centre, target, current, g1, g2))

    releases = []
    holder = {l: gr for gr, l in state.grasped}
    for joint, links in links_of.items():
        attached = [l for l in links if l in holder and l in state.in_hand]
        for l1, l2 in _pairs(attached):
            g1, g2 = holder[l1], holder[l2]
            if g1 != g2 and g1 not in state.free and g2 not in state.free:
                releases.append(ReleaseLinks(l1, l2, joint, g1, g2))
    out.extend(sorted(releases))
    return out


def why_inapplicable(state: State, action: SaesAction, topology: Topology) -> str | None:
    grasped = set(state.grasped)
    if isinstance(action, MoveLinkToCentral):
        l1, j1, g2 = action
        if not topology.connected(j1, l1):
            return f"joint {j1} is not connected to link {l1}"
        if g2 not in topology.grippers:
            return f"unknown gripper {g2}"
        if g2 not in state.free:
            return f"gripper {g2} is not free"
        if l1 in state.in_hand:
            return f"link {l1} is in hand"
        if state.in_centre == j1:
            return f"joint {j1} is already centred"
        return None
    if isinstance(action, TakeLinksToMove):
        l1, l2, j1, g1, g2 = action
        if l1 == l2 or g1 == g2:
            return "links and grippers must be distinct"
        if not (topology.connected(j1, l1) and topology.connected(j1, l2)):
            return f"joint {j1} does not connect links {l1} and {l2}"
        if state.in_centre != j1:
            return f"joint {j1} is not centred"
        if g1 not in state.free or g2 not in state.free:
            return "both grippers must be free"
        if l1 in state.in_hand or l2 in state.in_hand:
            return "a link is already in hand"
        return None
    if isinstance(action, ChangeAngle):
        l1, l2, j1, a1, a2, g1, g2 = action
        if l1 == l2 or g1 == g2:
            return "links and grippers must be distinct"
        if not (topology.connected(j1, l1) and topology.connected(j1, l2)):
            return f"joint {j1} does not connect links {l1} and {l2}"
        if state.in_centre != j1:
            return f"joint {j1} is not centred"
        if (g1, l1) not in grasped or (g2, l2) not in grasped:
            return "links are not grasped by the named grippers"
        if l1 not in state.in_hand or l2 not in state.in_hand:
            return "links are not in hand"
        if g1 in state.free or g2 in state.free:
            return "a gripper is free"
        if a1 not in topology.angles:
            return f"angle {a1} is not admissible"
        if state.angle(l1) != a2:
            return f"link {l1} is at {state.angle(l1)}, not {a2}"
        if not one_step(a1, a2, topology.granularity_deg):
            return f"{a2} -> {a1} is not a single granularity step"
        return None
    if isinstance(action, ReleaseLinks):
        l1, l2, j1, g1, g2 = action
        if l1 == l2 or g1 == g2:
            return "links and grippers must be distinct"
        if not (topology.connected(j1, l1) and topology.connected(j1, l2)):
            return f"joint {j1} does not connect links {l1} and {l2}"
        if (g1, l1) not in grasped or (g2, l2) not in grasped:
            return "links are not grasped by the named grippers"
        if l1 not in state.in_hand or l2 not in state.in_hand:
            return "links are not in hand"
        if g1 in state.free or g2 in state.free:
            return "a gripper is free"
        return None
    return f"unknown action {action!r}"


def apply_saes(state: State, action: SaesAction, topology: Topology) -> State:
    reason = why_inapplicable(state, action, topology)
    if reason is not None:
        raise InapplicableAction(f"{action.name}{tuple(action)}: {reason}")
    return _apply_unchecked(state, action)


def _apply_unchecked(state: State, action: SaesAction) -> State:
    if isinstance(action, MoveLinkToCentral):
        return State(state.angles, state.in_hand, state.grasped, state.free, action.joint)
    if isinstance(action, TakeLinksToMove):
        l1, l2, _, g1, g2 = action
        return State(
            state.angles,
            state.in_hand | {l1, l2},
            tuple(sorted({*state.grasped, (g1, l1), (g2, l2)})),
            state.free - {g1, g2},
            state.in_centre,
        )
    if isinstance(action, ChangeAngle):
        l1, l2, _, a1, a2, _, _ = action
        return State(
            shift_angles(state.angles, l1, l2, a1, a2),
            state.in_hand,
            state.grasped,
            state.free,
            state.in_centre,
        )
    l1, l2, _, g1, g2 = action
    return State(
        state.angles,
        state.in_hand - {l1, l2},
        tuple(p for p in state.grasped if p not in ((g1, l1), (g2, l2))),
        state.free | {g1, g2},
        state.in_centre,
    )


def successors_saes(state: State, topology: Topology):
    for action in applicable_saes(state, topology):
        yield action, _apply_unchecked(state, action)


def from_ground(action: GroundAction) -> SaesAction:
    cls = ACTION_TYPES.get(action.name)
    if cls is None or len(action.args) != len(cls._fields):
        raise InapplicableAction(f"{action} is not an elementary extended-scenario action")
    return cls(*action.args)
