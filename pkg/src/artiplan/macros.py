"""Macro operators: composition of lifted schemas, soundness of a pair, the
three macros of the macro-only action set, and expansion back to
elementary actions.

Set operations on literals are syntactic after variable renaming.  Negated
preconditions of the second operator that the first operator establishes
(``not p`` where ``p`` is deleted by the first) are dropped along with the
positive ones it adds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .domain import GroundAction, Plan, State, Topology, one_step, shift_angles
from .saes import (
    ChangeAngle,
    InapplicableAction,
    ReleaseLinks,
    TakeLinksToMove,
    MoveLinkToCentral,
    _joint_links,
    _pairs,
    successors_saes,
)
from .schemas import (
    CHANGE_ANGLE,
    MOVE_LINK_TO_CENTRAL,
    RELEASE_LINKS,
    TAKE_LINKS_TO_MOVE,
    TIME,
    Literal,
    OperatorSchema,
)

VarMap = Mapping[str, str]


class SortMismatch(ValueError):
    """A shared variable has different sorts in the two operators."""


class UnsoundComposition(ValueError):
    def __init__(self, witnesses: Sequence[Literal]):
        self.witnesses = tuple(witnesses)
        super().__init__(
            "first operator deletes a precondition of the second: "
            + ", ".join(str(w) for w in self.witnesses)
        )


@dataclass(frozen=True)
class MacroSchema(OperatorSchema):
    """A composed operator.  ``constituents`` lists the elementary schemas in
    execution order with the macro variables bound to their parameters."""

    constituents: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.constituents:
            raise ValueError(f"{self.name}: a macro needs at least one constituent")
        declared = set(self.variables)
        for name, args in self.constituents:
            if not set(args) <= declared:
                raise ValueError(f"{self.name}: constituent {name} uses undeclared variables")


NOOP = OperatorSchema("noop", (), frozenset(), frozenset(), frozenset())


def _is_identity(schema: OperatorSchema) -> bool:
    return not (schema.pre or schema.add or schema.delete or schema.params)


def constituents_of(schema: OperatorSchema) -> tuple[tuple[str, tuple[str, ...]], ...]:
    if isinstance(schema, MacroSchema):
        return schema.constituents
    if _is_identity(schema):
        return ()
    return ((schema.name, schema.variables),)


def rename(schema: OperatorSchema, mapping: VarMap | None) -> OperatorSchema:
    """Apply a variable renaming to every part of a schema."""
    if not mapping:
        return schema
    if TIME in mapping:
        raise ValueError("the time variable cannot be renamed")
    targets = [mapping.get(v, v) for v in schema.variables]
    if len(set(targets)) != len(targets):
        raise ValueError(f"renaming of {schema.name} is not injective")

    def ren(group: frozenset[Literal]) -> frozenset[Literal]:
        return frozenset(x.rename(mapping) for x in group)

    params = tuple((mapping.get(v, v), s) for v, s in schema.params)
    changes = dict(params=params, pre=ren(schema.pre), add=ren(schema.add), delete=ren(schema.delete))
    if isinstance(schema, MacroSchema):
        changes["constituents"] = tuple(
            (n, tuple(mapping.get(a, a) for a in args)) for n, args in schema.constituents
        )
    return replace(schema, **changes)


@dataclass(frozen=True)
class Soundness:
    witnesses: tuple[Literal, ...] = ()

    @property
    def sound(self) -> bool:
        return not self.witnesses

    @property
    def witness(self) -> Literal | None:
        return self.witnesses[0] if self.witnesses else None

    def __bool__(self) -> bool:
        return self.sound


def check_soundness(
    first: OperatorSchema,
    second: OperatorSchema,
    first_map: VarMap | None = None,
    second_map: VarMap | None = None,
) -> Soundness:
    """Unsound iff a template deleted (and not re-added) by ``first`` is a
    positive precondition of ``second``."""
    a, b = rename(first, first_map), rename(second, second_map)
    removed = a.delete - a.add
    clash = sorted(removed & b.positive_pre, key=str)
    return Soundness(tuple(clash))


def _merge_params(a: OperatorSchema, b: OperatorSchema) -> dict[str, str]:
    sorts = dict(a.params)
    for v, s in b.params:
        if v in sorts and sorts[v] != s:
            raise SortMismatch(f"variable {v} is a {sorts[v]} in {a.name} but a {s} in {b.name}")
        sorts.setdefault(v, s)
    return sorts


def compose(
    first: OperatorSchema,
    second: OperatorSchema,
    first_map: VarMap | None = None,
    second_map: VarMap | None = None,
    *,
    name: str | None = None,
    params: Sequence[str] | None = None,
    strict: bool = False,
) -> MacroSchema:
    """Macro executing ``first`` then ``second``.

    ``params`` fixes the argument order of the result (default: the first
    operator's variables, then the new ones of the second).
    """
    a, b = rename(first, first_map), rename(second, second_map)
    sorts = _merge_params(a, b)
    if strict:
        verdict = check_soundness(a, b)
        if not verdict.sound:
            raise UnsoundComposition(verdict.witnesses)

    established = a.add | {Literal(p.pred, p.args, True) for p in a.delete}
    pre = a.pre | (b.pre - established)
    delete = (a.delete - b.add) | b.delete
    add = (a.add - b.delete) | b.add

    if params is None:
        order = list(sorts)
    else:
        order = list(params)
        if set(order) != set(sorts) or len(order) != len(sorts):
            raise ValueError(f"params {order} must list exactly {sorted(sorts)}")
    steps = constituents_of(a) + constituents_of(b)
    if not steps:
        steps = (("noop", ()),)
    return MacroSchema(
        name or f"{a.name}_{b.name}",
        tuple((v, sorts[v]) for v in order),
        frozenset(pre),
        frozenset(add),
        frozenset(delete),
        steps,
    )


def compose_all(schemas: Iterable[OperatorSchema], **kwargs) -> MacroSchema:
    """Left fold of :func:`compose` over a sequence of identically named schemas."""
    schemas = list(schemas)
    if not schemas:
        raise ValueError("nothing to compose")
    final = {k: kwargs.pop(k) for k in ("name", "params") if k in kwargs}
    acc = schemas[0]
    if len(schemas) == 1:
        return compose(acc, NOOP, **final, **kwargs)
    for i, nxt in enumerate(schemas[1:], start=2):
        last = i == len(schemas)
        acc = compose(acc, nxt, **(final if last else {}), **kwargs)
    return acc


# --- the macro-only action set ------------------------------------------------

LINK_TO_CENTRAL_TAKE = "linkToCentral_take"
CHANGE_ANGLE_RELEASE = "changeAngle_release"
GRASP_CHANGE_ANGLE_RELEASE = "grasp_changeAngle_release"


@lru_cache(maxsize=1)
def maes_action_set() -> tuple[MacroSchema, MacroSchema, MacroSchema]:
    """The three macros, in signature order of their plan atoms."""
    centre_take = compose(
        MOVE_LINK_TO_CENTRAL,
        TAKE_LINKS_TO_MOVE,
        name=LINK_TO_CENTRAL_TAKE,
        params=("L1", "L2", "J1", "G1", "G2"),
        strict=True,
    )
    change_release = compose(
        CHANGE_ANGLE,
        RELEASE_LINKS,
        name=CHANGE_ANGLE_RELEASE,
        params=("L1", "L2", "J1", "G1", "G2", "A1", "A2"),
        strict=True,
    )
    grasp_change_release = compose_all(
        (TAKE_LINKS_TO_MOVE, CHANGE_ANGLE, RELEASE_LINKS),
        name=GRASP_CHANGE_ANGLE_RELEASE,
        params=("L1", "L2", "J1", "A1", "A2", "G1", "G2"),
        strict=True,
    )
    return centre_take, change_release, grasp_change_release


def macro_schema(name: str) -> MacroSchema:
    for schema in maes_action_set():
        if schema.name == name:
            return schema
    raise KeyError(name)


class LinkToCentralTake(NamedTuple):
    link1: int
    link2: int
    joint: int
    gripper1: int
    gripper2: int

    name = LINK_TO_CENTRAL_TAKE


class ChangeAngleRelease(NamedTuple):
    rotated: int
    held: int
    joint: int
    gripper1: int
    gripper2: int
    target: int
    current: int

    name = CHANGE_ANGLE_RELEASE


class GraspChangeAngleRelease(NamedTuple):
    rotated: int
    held: int
    joint: int
    target: int
    current: int
    gripper1: int
    gripper2: int

    name = GRASP_CHANGE_ANGLE_RELEASE


MacroAction = Union[LinkToCentralTake, ChangeAngleRelease, GraspChangeAngleRelease]
MACRO_TYPES = {
    cls.name: cls for cls in (LinkToCentralTake, ChangeAngleRelease, GraspChangeAngleRelease)
}


def applicable_maes(state: State, topology: Topology) -> list[MacroAction]:
    links_of = _joint_links(topology)
    free = sorted(state.free)
    grips = _pairs(free)
    g = topology.granularity_deg
    out: list[MacroAction] = []

    for joint, links in links_of.items():
        if joint == state.in_centre:
            continue
        loose = [l for l in links if l not in state.in_hand]
        out.extend(
            LinkToCentralTake(l1, l2, joint, g1, g2)
            for l1, l2 in _pairs(loose)
            for g1, g2 in grips
        )

    centre = state.in_centre
    if centre is None:
        return out
    links = links_of.get(centre, ())

    holder = {l: gr for gr, l in state.grasped}
    attached = [l for l in links if l in holder and l in state.in_hand]
    for l1, l2 in _pairs(attached):
        g1, g2 = holder[l1], holder[l2]
        if g1 == g2 or g1 in state.free or g2 in state.free:
            continue
        current = state.angle(l1)
        for target in sorted({(current + g) % 360, (current - g) % 360} - {current}):
            out.append(ChangeAngleRelease(l1, l2, centre, g1, g2, target, current))

    loose = [l for l in links if l not in state.in_hand]
    for l1, l2 in _pairs(loose):
        current = state.angle(l1)
        for target in sorted({(current + g) % 360, (current - g) % 360} - {current}):
            out.extend(
                GraspChangeAngleRelease(l1, l2, centre, target, current, g1, g2)
                for g1, g2 in grips
            )
    return out


def why_inapplicable(state: State, action: MacroAction, topology: Topology) -> str | None:
    if isinstance(action, LinkToCentralTake):
        l1, l2, j1, g1, g2 = action
        if state.in_centre == j1:
            return f"joint {j1} is already centred"
        if l1 == l2 or g1 == g2:
            return "links and grippers must be distinct"
        if not (topology.connected(j1, l1) and topology.connected(j1, l2)):
            return f"joint {j1} does not connect links {l1} and {l2}"
        if g1 not in state.free or g2 not in state.free:
            return "both grippers must be free"
        if l1 in state.in_hand or l2 in state.in_hand:
            return "a link is already in hand"
        return None
    if isinstance(action, ChangeAngleRelease):
        l1, l2, j1, g1, g2, a1, a2 = action
        return _rotation_problem(
            state, topology, ChangeAngle(l1, l2, j1, a1, a2, g1, g2), holding=True
        )
    if isinstance(action, GraspChangeAngleRelease):
        l1, l2, j1, a1, a2, g1, g2 = action
        problem = _rotation_problem(
            state, topology, ChangeAngle(l1, l2, j1, a1, a2, g1, g2), holding=False
        )
        if problem is None and (l1 in state.in_hand or l2 in state.in_hand):
            return "a link is already in hand"
        return problem
    return f"unknown macro {action!r}"


def _rotation_problem(state: State, topology: Topology, rot: ChangeAngle, holding: bool):
    l1, l2, j1, a1, a2, g1, g2 = rot
    if l1 == l2 or g1 == g2:
        return "links and grippers must be distinct"
    if not (topology.connected(j1, l1) and topology.connected(j1, l2)):
        return f"joint {j1} does not connect links {l1} and {l2}"
    if state.in_centre != j1:
        return f"joint {j1} is not centred"
    if holding:
        grasped = set(state.grasped)
        if (g1, l1) not in grasped or (g2, l2) not in grasped:
            return "links are not grasped by the named grippers"
        if l1 not in state.in_hand or l2 not in state.in_hand:
            return "links are not in hand"
        if g1 in state.free or g2 in state.free:
            return "a gripper is free"
    elif g1 not in state.free or g2 not in state.free:
        return "both grippers must be free"
    if a1 not in topology.angles:
        return f"angle {a1} is not admissible"
    if state.angle(l1) != a2:
        return f"link {l1} is at {state.angle(l1)}, not {a2}"
    if not one_step(a1, a2, topology.granularity_deg):
        return f"{a2} -> {a1} is not a single granularity step"
    return None


def apply_maes(state: State, action: MacroAction, topology: Topology) -> State:
    reason = why_inapplicable(state, action, topology)
    if reason is not None:
        raise InapplicableAction(f"{action.name}{tuple(action)}: {reason}")
    return _apply_unchecked(state, action)


def _apply_unchecked(state: State, action: MacroAction) -> State:
    if isinstance(action, LinkToCentralTake):
        l1, l2, j1, g1, g2 = action
        return State(
            state.angles,
            state.in_hand | {l1, l2},
            tuple(sorted({*state.grasped, (g1, l1), (g2, l2)})),
            state.free - {g1, g2},
            j1,
        )
    if isinstance(action, ChangeAngleRelease):
        l1, l2, _, g1, g2, a1, a2 = action
        return State(
            shift_angles(state.angles, l1, l2, a1, a2),
            state.in_hand - {l1, l2},
            tuple(p for p in state.grasped if p not in ((g1, l1), (g2, l2))),
            state.free | {g1, g2},
            state.in_centre,
        )
    l1, l2, _, a1, a2, _, _ = action
    return replace(state, angles=shift_angles(state.angles, l1, l2, a1, a2))


def successors_maes(state: State, topology: Topology, mixed: bool = False):
    """Macro successors; with ``mixed`` the elementary actions follow them."""
    for action in applicable_maes(state, topology):
        yield action, _apply_unchecked(state, action)
    if mixed:
        yield from successors_saes(state, topology)


def from_ground(action: GroundAction) -> MacroAction:
    cls = MACRO_TYPES.get(action.name)
    if cls is None or len(action.args) != len(cls._fields):
        raise InapplicableAction(f"{action} is not a macro action")
    return cls(*action.args)


def expand_action(action: GroundAction) -> list[GroundAction]:
    """Elementary actions of one ground macro (timesteps left at 0)."""
    schema = macro_schema(action.name)
    if len(action.args) != schema.arity:
        raise ValueError(f"{action.name} takes {schema.arity} arguments")
    binding = dict(zip(schema.variables, action.args))
    return [
        GroundAction(name, tuple(binding[v] for v in args))
        for name, args in schema.constituents
    ]


def expand(plan: Plan) -> Plan:
    """Replace every macro by its constituents, renumbering timesteps.
    Elementary actions (as in a mixed plan) are kept as they are."""
    out: list[GroundAction] = []
    for action in plan:
        if action.name in MACRO_TYPES:
            out.extend(expand_action(action))
        else:
            out.append(action)
    return Plan.of(out)


__all__ = [
    "ChangeAngleRelease",
    "GraspChangeAngleRelease",
    "LinkToCentralTake",
    "MacroSchema",
    "MoveLinkToCentral",
    "NOOP",
    "ReleaseLinks",
    "Soundness",
    "SortMismatch",
    "TakeLinksToMove",
    "UnsoundComposition",
    "apply_maes",
    "applicable_maes",
    "check_soundness",
    "compose",
    "compose_all",
    "expand",
    "maes_action_set",
]
