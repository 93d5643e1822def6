"""Lifted operator schemas and a direct interpreter over their literal sets.

A schema is a STRIPS-style operator whose preconditions are literals over
three kinds of predicates:

* static facts of the object (``link``, ``joint``, ``connected`` ...),
* fluents, whose last argument is the time variable ``T``,
* builtin guards: ``<>``, ``>``, and ``one_step(A1, A2)``.

Two effect conventions keep the literal sets faithful to the rule encoding:
``hasAngle`` and ``in_centre`` are functional (adding a value replaces the
previous one), and the marker ``propagate(X1, X2, A1, A2, T)`` shifts every
element beyond ``X1`` (away from ``X2``) by ``A1 - A2``.

The interpreter here is deliberately independent from the hand-written
transition functions in :mod:`artiplan.sas` and :mod:`artiplan.saes`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .domain import Scenario, State, Topology, normalize_angle, one_step

TIME = "T"

STATIC = frozenset({"link", "joint", "gripper", "angle", "time", "connected", "isLinked"})
FLUENTS = frozenset({"hasAngle", "in_hand", "grasped", "free", "in_centre"})
BUILTINS = frozenset({"<>", ">", "one_step"})
MARKERS = frozenset({"propagate"})
# fluents whose first argument determines the rest (one value at a time)
FUNCTIONAL = {"hasAngle": 1, "in_centre": 0}

SORTS = ("link", "joint", "gripper", "angle")


@dataclass(frozen=True, order=True)
class Literal:
    pred: str
    args: tuple[str, ...]
    negated: bool = False

    def __post_init__(self) -> None:
        known = STATIC | FLUENTS | BUILTINS | MARKERS
        if self.pred not in known:
            raise ValueError(f"unknown predicate {self.pred!r}")
        if self.negated and self.pred not in FLUENTS | STATIC:
            raise ValueError(f"{self.pred} cannot be negated")

    def __str__(self) -> str:
        if self.pred in ("<>", ">"):
            return f"{self.args[0]}{self.pred}{self.args[1]}"
        body = f"{self.pred}({','.join(self.args)})"
        return f"not {body}" if self.negated else body

    @property
    def positive(self) -> Literal:
        return Literal(self.pred, self.args)

    def negate(self) -> Literal:
        return Literal(self.pred, self.args, not self.negated)

    def rename(self, mapping: Mapping[str, str]) -> Literal:
        return Literal(self.pred, tuple(mapping.get(a, a) for a in self.args), self.negated)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.args)


def lit(text: str) -> Literal:
    """Build a literal from ``"not in_hand(L1,T)"``, ``"L1<>L2"`` or ``"J1>J2"``."""
    text = text.strip()
    negated = text.startswith("not ")
    if negated:
        text = text[4:].strip()
    for op in ("<>", ">"):
        if op in text and "(" not in text:
            left, right = text.split(op)
            return Literal(op, (left.strip(), right.strip()))
    name, _, rest = text.partition("(")
    args = tuple(a.strip() for a in rest.rstrip(")").split(",")) if rest else ()
    return Literal(name.strip(), args, negated)


def lits(*texts: str) -> frozenset[Literal]:
    return frozenset(lit(t) for t in texts)


def _fmt_set(items: Iterable[Literal]) -> str:
    return "{" + ", ".join(str(x) for x in sorted(items, key=str)) + "}"


@dataclass(frozen=True)
class OperatorSchema:
    """Lifted operator.  ``params`` lists ``(variable, sort)`` in argument
    order; the time variable ``T`` is implicit."""

    name: str
    params: tuple[tuple[str, str], ...]
    pre: frozenset[Literal]
    add: frozenset[Literal]
    delete: frozenset[Literal]

    def __post_init__(self) -> None:
        declared = {v for v, _ in self.params} | {TIME}
        for v, sort in self.params:
            if sort not in SORTS:
                raise ValueError(f"unknown sort {sort!r} for {v}")
        if len(declared) != len(self.params) + 1:
            raise ValueError(f"{self.name}: duplicate parameter")
        for group in (self.pre, self.add, self.delete):
            for literal in group:
                missing = literal.variables - declared
                if missing:
                    raise ValueError(
                        f"{self.name}: {literal} uses undeclared {sorted(missing)}"
                    )
        clash = self.add & self.delete
        if clash:
            raise ValueError(f"{self.name}: {_fmt_set(clash)} both added and deleted")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    @property
    def sorts(self) -> dict[str, str]:
        return dict(self.params)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def positive_pre(self) -> frozenset[Literal]:
        return frozenset(p for p in self.pre if not p.negated and p.pred not in BUILTINS)

    def describe(self) -> str:
        head = f"{self.name}({','.join((*self.variables, TIME))})"
        return (
            f"{head}\n  pre: {_fmt_set(self.pre)}\n"
            f"  del: {_fmt_set(self.delete)}\n  add: {_fmt_set(self.add)}"
        )


# --- elementary schemas ------------------------------------------------------

CHANGE_ANGLE_SAS = OperatorSchema(
    "changeAngle",
    (("J1", "joint"), ("J2", "joint"), ("A", "angle"), ("Ai", "angle")),
    pre=lits(
        "joint(J1)", "joint(J2)", "J1>J2", "angle(A)", "time(T)",
        "hasAngle(J1,Ai,T)", "A<>Ai", "isLinked(J1,J2)", "one_step(A,Ai)",
    ),
    add=lits("hasAngle(J1,A,T)", "propagate(J1,J2,A,Ai,T)"),
    delete=lits("hasAngle(J1,Ai,T)"),
)

MOVE_LINK_TO_CENTRAL = OperatorSchema(
    "move_link_to_central",
    (("L1", "link"), ("J1", "joint"), ("G2", "gripper")),
    pre=lits(
        "link(L1)", "joint(J1)", "gripper(G2)", "time(T)", "free(G2,T)",
        "connected(J1,L1)", "not in_hand(L1,T)", "not in_centre(J1,T)",
    ),
    add=lits("in_centre(J1,T)"),
    delete=frozenset(),
)

TAKE_LINKS_TO_MOVE = OperatorSchema(
    "take_links_to_move",
    (("L1", "link"), ("L2", "link"), ("J1", "joint"), ("G1", "gripper"), ("G2", "gripper")),
    pre=lits(
        "link(L1)", "link(L2)", "joint(J1)", "gripper(G1)", "gripper(G2)",
        "in_centre(J1,T)", "free(G1,T)", "free(G2,T)", "connected(J1,L2)",
        "not in_hand(L1,T)", "not in_hand(L2,T)", "connected(J1,L1)", "L1<>L2", "G1<>G2",
    ),
    add=lits("in_hand(L1,T)", "in_hand(L2,T)", "grasped(G1,L1,T)", "grasped(G2,L2,T)"),
    delete=lits("free(G1,T)", "free(G2,T)"),
)

CHANGE_ANGLE = OperatorSchema(
    "changeAngle",
    (
        ("L1", "link"), ("L2", "link"), ("J1", "joint"), ("A1", "angle"),
        ("A2", "angle"), ("G1", "gripper"), ("G2", "gripper"),
    ),
    pre=lits(
        "link(L1)", "link(L2)", "joint(J1)", "angle(A1)", "angle(A2)", "gripper(G1)",
        "gripper(G2)", "time(T)", "in_centre(J1,T)", "grasped(G1,L1,T)",
        "grasped(G2,L2,T)", "in_hand(L1,T)", "in_hand(L2,T)", "not free(G1,T)",
        "not free(G2,T)", "connected(J1,L1)", "connected(J1,L2)", "hasAngle(L1,A2,T)",
        "L1<>L2", "G1<>G2", "one_step(A1,A2)",
    ),
    add=lits("hasAngle(L1,A1,T)", "propagate(L1,L2,A1,A2,T)"),
    delete=lits("hasAngle(L1,A2,T)"),
)

RELEASE_LINKS = OperatorSchema(
    "release_links",
    (("L1", "link"), ("L2", "link"), ("J1", "joint"), ("G1", "gripper"), ("G2", "gripper")),
    pre=lits(
        "link(L1)", "link(L2)", "joint(J1)", "gripper(G1)", "gripper(G2)", "time(T)",
        "grasped(G2,L2,T)", "grasped(G1,L1,T)", "in_hand(L1,T)", "in_hand(L2,T)",
        "not free(G1,T)", "not free(G2,T)", "connected(J1,L1)", "connected(J1,L2)",
        "L1<>L2", "G1<>G2",
    ),
    add=lits("free(G1,T)", "free(G2,T)"),
    delete=lits("grasped(G1,L1,T)", "grasped(G2,L2,T)", "in_hand(L1,T)", "in_hand(L2,T)"),
)

SAES_SCHEMAS = (MOVE_LINK_TO_CENTRAL, TAKE_LINKS_TO_MOVE, CHANGE_ANGLE, RELEASE_LINKS)
SAS_SCHEMAS = (CHANGE_ANGLE_SAS,)


# --- interpreter --------------------------------------------------------------

Atom = tuple  # fluent/static atom without its time argument


@dataclass(frozen=True)
class World:
    """Static facts of a topology, as atoms."""

    topology: Topology
    statics: frozenset[Atom] = field(init=False)

    def __post_init__(self) -> None:
        topo = self.topology
        facts: set[Atom] = {("angle", a) for a in topo.angles}
        facts |= {("joint", j) for j in topo.joints}
        if topo.scenario is Scenario.SAS:
            facts |= {("isLinked", a, b) for a, b in topo.adjacency}
        else:
            facts |= {("link", l) for l in topo.links}
            facts |= {("gripper", g) for g in topo.grippers}
            facts |= {("connected", j, l) for j, l in topo.adjacency}
        object.__setattr__(self, "statics", frozenset(facts))


def state_atoms(state: State, topology: Topology) -> frozenset[Atom]:
    """Fluent atoms of a state (time argument dropped)."""
    atoms: set[Atom] = {("hasAngle", e, a) for e, a in state.angle_map().items()}
    if topology.scenario is Scenario.SAS:
        atoms.add(("hasAngle", 0, 0))  # hidden reference joint
    else:
        atoms |= {("in_hand", l) for l in state.in_hand}
        atoms |= {("grasped", g, l) for g, l in state.grasped}
        atoms |= {("free", g) for g in state.free}
        if state.in_centre is not None:
            atoms.add(("in_centre", state.in_centre))
    return frozenset(atoms)


def atoms_state(atoms: Iterable[Atom], topology: Topology) -> State:
    """Inverse of :func:`state_atoms`.  Raises ``ValueError`` if an element has
    no or several angles, or several joints are centred."""
    angles: dict[int, list[int]] = {e: [] for e in topology.elements}
    in_hand, grasped, free, centre = set(), [], set(), []
    for atom in atoms:
        pred = atom[0]
        if pred == "hasAngle":
            if atom[1] in angles:
                angles[atom[1]].append(atom[2])
        elif pred == "in_hand":
            in_hand.add(atom[1])
        elif pred == "grasped":
            grasped.append((atom[1], atom[2]))
        elif pred == "free":
            free.add(atom[1])
        elif pred == "in_centre":
            centre.append(atom[1])
    for e, values in angles.items():
        if len(values) != 1:
            raise ValueError(f"element {e} has {len(values)} angles")
    if len(centre) > 1:
        raise ValueError("several joints are centred")
    return State(
        tuple(angles[e][0] for e in topology.elements),
        frozenset(in_hand),
        tuple(sorted(grasped)),
        frozenset(free),
        centre[0] if centre else None,
    )


def bind(schema: OperatorSchema, args: Iterable[int]) -> dict[str, int]:
    args = tuple(args)
    if len(args) != schema.arity:
        raise ValueError(f"{schema.name} takes {schema.arity} arguments, got {len(args)}")
    return dict(zip(schema.variables, args))


def ground(literal: Literal, binding: Mapping[str, int]) -> Atom:
    """Atom for a literal under a binding; the time argument is dropped."""
    args = literal.args
    if literal.pred in FLUENTS or literal.pred in MARKERS:
        args = args[:-1]
    return (literal.pred, *(binding[a] for a in args))


def holds(
    literal: Literal,
    binding: Mapping[str, int],
    atoms: frozenset[Atom],
    world: World,
) -> bool:
    if literal.pred == "time":
        return True  # the planner owns the horizon
    values = [binding[a] for a in literal.args if a != TIME]
    if literal.pred == "<>":
        return values[0] != values[1]
    if literal.pred == ">":
        return values[0] > values[1]
    if literal.pred == "one_step":
        return one_step(values[0], values[1], world.topology.granularity_deg)
    atom = ground(literal, binding)
    present = atom in (world.statics if literal.pred in STATIC else atoms)
    return present != literal.negated


def first_failure(
    schema: OperatorSchema,
    binding: Mapping[str, int],
    atoms: frozenset[Atom],
    world: World,
) -> Literal | None:
    """The first (in sorted order) precondition literal that does not hold."""
    for literal in sorted(schema.pre, key=str):
        if not holds(literal, binding, atoms, world):
            return literal
    return None


def apply_effects(
    schema: OperatorSchema,
    binding: Mapping[str, int],
    atoms: frozenset[Atom],
) -> frozenset[Atom]:
    """Successor atoms: propagation first (on the old angles), then deletes,
    then adds with functional replacement."""
    out = set(atoms)
    angle_of = {a[1]: a[2] for a in atoms if a[0] == "hasAngle"}
    for marker in schema.add:
        if marker.pred != "propagate":
            continue
        moved, held, target, current = (binding[a] for a in marker.args[:-1])
        delta = target - current
        far = (lambda e: e > moved) if moved > held else (lambda e: e < moved)
        for e, a in angle_of.items():
            if e > 0 and far(e):
                out.discard(("hasAngle", e, a))
                out.add(("hasAngle", e, normalize_angle(a + delta)))
    for literal in schema.delete:
        out.discard(ground(literal, binding))
    for literal in schema.add:
        if literal.pred in MARKERS:
            continue
        atom = ground(literal, binding)
        keep = FUNCTIONAL.get(atom[0])
        if keep is not None:
            out = {a for a in out if a[0] != atom[0] or a[1 : 1 + keep] != atom[1 : 1 + keep]}
        out.add(atom)
    return frozenset(out)


def grounded_text(literal: Literal, binding: Mapping[str, int], t: int) -> str:
    """Human-readable grounded literal at timestep ``t``."""
    full = dict(binding)
    full[TIME] = t
    return str(literal.rename({k: str(v) for k, v in full.items()}))
