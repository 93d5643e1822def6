"""Reading and writing problem instances and plans in ASP fact syntax.

Only ground facts, inclusive intervals ``a..b`` and ``#const`` directives for
``granularity`` and ``timemax`` are understood; rules are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .domain import GroundAction, Plan, Scenario, State, Topology

Atom = tuple  # (predicate, arg, ...)

# predicate -> arity; ``angles`` is accepted as a spelling of ``angle``
PREDICATES = {
    "joint": 1,
    "link": 1,
    "angle": 1,
    "angles": 1,
    "gripper": 1,
    "time": 1,
    "isLinked": 2,
    "connected": 2,
    "hasAngle": 3,
    "goal": 2,
    "in_centre": 2,
    "free": 2,
    "in_hand": 2,
    "grasped": 3,
    "length": 2,
}

PLAN_ARITIES = {
    "changeAngle": (4, 7),
    "move_link_to_central": (3,),
    "take_links_to_move": (5,),
    "release_links": (5,),
    "linkToCentral_take": (5,),
    "changeAngle_release": (7,),
    "grasp_changeAngle_release": (7,),
}

MAX_INTERVAL = 100_000
OPEN = None  # upper bound of ``time(a..timemax)`` when timemax is symbolic


class ParseError(ValueError):
    """Malformed input; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<const>\#const\b)
  | (?P<range>\.\.)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),.=])
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            yield kind, value, line, col
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    yield "eof", "", line, col


class _Reader:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str, value: str | None = None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2], tok[3])
        return tok


def _int(tok) -> int:
    try:
        return int(tok[1])
    except ValueError:
        raise ParseError("integer literal too large", tok[2], tok[3]) from None


def _statements(text: str):
    """Yield ``("const", name, value, pos)`` and ``("atom", name, terms, pos)``.

    Terms are ints or ``(lo, hi)`` intervals whose ``hi`` may be a symbolic
    constant name.
    """
    r = _Reader(text)
    while r.peek()[0] != "eof":
        tok = r.next()
        pos = tok[2:]
        if tok[0] == "const":
            name = r.expect("ident")[1]
            r.expect("punct", "=")
            value = _int(r.expect("int"))
            r.expect("punct", ".")
            yield "const", name, value, pos
            continue
        if tok[0] != "ident":
            raise ParseError(f"expected a fact, found {tok[1]!r}", *pos)
        name = tok[1]
        terms = []
        if r.peek()[1] == "(":
            r.next()
            while True:
                t = r.next()
                if t[0] == "int":
                    lo = _int(t)
                    if r.peek()[0] == "range":
                        r.next()
                        h = r.next()
                        if h[0] == "int":
                            terms.append((lo, _int(h)))
                        elif h[0] == "ident":
                            terms.append((lo, h[1]))
                        else:
                            raise ParseError("bad interval bound", h[2], h[3])
                    else:
                        terms.append(lo)
                elif t[0] == "ident":
                    terms.append(t[1])
                else:
                    raise ParseError(f"expected a term, found {t[1] or 'end of input'!r}", t[2], t[3])
                sep = r.next()
                if sep[1] == ")":
                    break
                if sep[1] != ",":
                    raise ParseError(f"expected ',' or ')', found {sep[1] or 'end of input'!r}", sep[2], sep[3])
        end = r.next()
        if end[1] != ".":
            raise ParseError(f"expected '.', found {end[1] or 'end of input'!r}", end[2], end[3])
        yield "atom", name, terms, pos


def _expand(terms, consts: Mapping[str, int], pos) -> list[tuple[int, ...]]:
    choices = []
    for t in terms:
        if isinstance(t, int):
            choices.append((t,))
        elif isinstance(t, tuple):
            lo, hi = t
            if isinstance(hi, str):
                if hi not in consts:
                    raise ParseError(f"undefined constant {hi!r}", *pos)
                hi = consts[hi]
            if hi - lo + 1 > MAX_INTERVAL:
                raise ParseError("interval too large", *pos)
            choices.append(tuple(range(lo, hi + 1)))
        else:
            if t not in consts:
                raise ParseError(f"undefined constant {t!r}", *pos)
            choices.append((consts[t],))
    total = 1
    for c in choices:
        total *= max(len(c), 1)
    if total > MAX_INTERVAL:
        raise ParseError("interval expansion too large", *pos)
    return list(product(*choices))


@dataclass(frozen=True)
class Instance:
    """A parsed problem instance.

    ``facts`` keeps every ground fact (canonically sorted) so the consistency
    checker sees exactly what the file said; ``initial`` is ``None`` when the
    facts do not pin down one angle per element.
    """

    topology: Topology
    initial: State | None
    goals: Mapping[int, int]
    declared_angles: frozenset[int]
    horizon_limit: int | None = None
    facts: tuple[Atom, ...] = ()
    time_ranges: tuple[tuple[int, int | None], ...] = ()

    @property
    def scenario(self) -> Scenario:
        return self.topology.scenario

    def has_time(self, t: int) -> bool:
        if not self.time_ranges:
            return t >= 0
        return any(lo <= t and (hi is None or t <= hi) for lo, hi in self.time_ranges)

    def with_initial(self, state: State) -> Instance:
        """Same object and goals, new initial state (used for re-planning)."""
        return make_instance(
            self.topology,
            state,
            self.goals,
            self.declared_angles,
            horizon_limit=self.horizon_limit,
            time_ranges=self.time_ranges,
        )


def state_facts(state: State, scenario: Scenario, t: int = 0) -> list[Atom]:
    facts: list[Atom] = [("hasAngle", e, a, t) for e, a in state.angle_map().items()]
    if scenario.extended:
        if state.in_centre is not None:
            facts.append(("in_centre", state.in_centre, t))
        facts += [("free", g, t) for g in state.free]
        facts += [("in_hand", l, t) for l in state.in_hand]
        facts += [("grasped", g, l, t) for g, l in state.grasped]
    return facts


def make_instance(
    topology: Topology,
    initial: State,
    goals: Mapping[int, int],
    declared_angles: Iterable[int] | None = None,
    horizon_limit: int | None = None,
    time_ranges: tuple[tuple[int, int | None], ...] = ((0, OPEN),),
) -> Instance:
    """Build an instance (and its canonical fact list) from structured parts."""
    declared = frozenset(topology.angles if declared_angles is None else declared_angles)
    facts: list[Atom] = [("angle", a) for a in declared]
    if topology.scenario is Scenario.SAS:
        facts += [("joint", j) for j in topology.elements]
        facts += [("isLinked", a, b) for a, b in topology.adjacency if 0 < a < b]
    else:
        facts += [("link", l) for l in topology.links]
        facts += [("joint", j) for j in range(1, topology.num_joints + 1)]
        facts += [("connected", j, l) for j, l in topology.adjacency]
        facts += [("gripper", g) for g in topology.grippers]
    if any(length != 1.0 for length in topology.link_lengths):
        facts += [("length", i + 1, int(v)) for i, v in enumerate(topology.link_lengths)]
    facts += state_facts(initial, topology.scenario)
    facts += [("goal", e, a) for e, a in goals.items()]
    return Instance(
        topology=topology,
        initial=initial,
        goals=dict(sorted(goals.items())),
        declared_angles=declared,
        horizon_limit=horizon_limit,
        facts=tuple(sorted(set(facts), key=_fact_key)),
        time_ranges=time_ranges,
    )


def _fact_key(atom: Atom):
    return (atom[0], atom[1:])


def _contiguous(ids: set[int], what: str) -> int:
    n = len(ids)
    if ids != set(range(1, n + 1)):
        raise ParseError(f"{what} must be numbered 1..{n}")
    return n


def parse_instance(text: str | bytes) -> Instance:
    """Parse an instance file.  Raises :class:`ParseError` on bad input."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8 at byte {exc.start}") from None

    consts: dict[str, int] = {}
    raw: list[tuple[str, list, tuple]] = []
    for kind, name, payload, pos in _statements(text):
        if kind == "const":
            if name not in ("granularity", "timemax"):
                raise ParseError(f"unknown constant {name!r}", *pos)
            if name in consts:
                raise ParseError(f"duplicate #const {name}", *pos)
            consts[name] = payload
        else:
            if name not in PREDICATES:
                raise ParseError(f"unknown predicate {name!r}", *pos)
            if len(payload) != PREDICATES[name]:
                raise ParseError(
                    f"{name} takes {PREDICATES[name]} argument(s), got {len(payload)}", *pos
                )
            raw.append((name, payload, pos))

    if "granularity" not in consts:
        raise ParseError("no granularity declared")
    granularity = consts["granularity"]

    facts: set[Atom] = set()
    time_ranges: list[tuple[int, int | None]] = []
    for name, terms, pos in raw:
        if name == "time":
            (t,) = terms
            if isinstance(t, tuple) and isinstance(t[1], str) and t[1] not in consts:
                if t[1] != "timemax":
                    raise ParseError(f"undefined constant {t[1]!r}", *pos)
                time_ranges.append((t[0], OPEN))
                continue
            for (v,) in _expand(terms, consts, pos):
                time_ranges.append((v, v))
            continue
        name = "angle" if name == "angles" else name
        for args in _expand(terms, consts, pos):
            facts.add((name, *args))

    preds = {f[0] for f in facts}
    extended = bool(preds & {"link", "connected"})
    if extended and "isLinked" in preds:
        raise ParseError("isLinked and connected cannot be mixed in one instance")
    scenario = Scenario.SAES if extended else Scenario.SAS

    def ids(pred: str) -> set[int]:
        return {f[1] for f in facts if f[0] == pred}

    lengths_map = {f[1]: f[2] for f in facts if f[0] == "length"}
    if scenario is Scenario.SAS:
        joints = ids("joint") - {0}
        n = _contiguous(joints, "joints")
        num_links = num_joints = n
        pairs = {(f[1], f[2]) for f in facts if f[0] == "isLinked"} | {(0, 1)}
        adjacency = frozenset(pairs | {(b, a) for a, b in pairs})
        grippers: tuple[int, ...] = ()
    else:
        n = num_links = _contiguous(ids("link"), "links")
        num_joints = _contiguous(ids("joint"), "joints")
        adjacency = frozenset((f[1], f[2]) for f in facts if f[0] == "connected")
        grippers = tuple(sorted(ids("gripper")))
    if n == 0:
        raise ParseError("instance declares no joints or links")
    lengths = tuple(float(lengths_map.get(i, 1)) for i in range(1, n + 1))
    try:
        topology = Topology(
            scenario, num_links, num_joints, granularity, adjacency, lengths, grippers
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    goals: dict[int, int] = {}
    for f in sorted(facts):
        if f[0] == "goal":
            goals[f[1]] = f[2]

    instance = Instance(
        topology=topology,
        initial=_initial_state(facts, topology),
        goals=goals,
        declared_angles=frozenset(ids("angle")),
        horizon_limit=consts.get("timemax"),
        facts=tuple(sorted(facts, key=_fact_key)),
        time_ranges=tuple(sorted(set(time_ranges), key=lambda r: (r[0], r[1] is None, r[1] or 0))),
    )
    return instance


def _initial_state(facts: set[Atom], topology: Topology) -> State | None:
    angles: dict[int, list[int]] = {e: [] for e in topology.elements}
    for f in facts:
        if f[0] == "hasAngle" and f[3] == 0 and f[1] in angles:
            angles[f[1]].append(f[2])
    if any(len(v) != 1 for v in angles.values()):
        return None
    ordered = tuple(angles[e][0] for e in topology.elements)
    if topology.scenario is Scenario.SAS:
        return State(ordered)
    centres = [f[1] for f in facts if f[0] == "in_centre" and f[2] == 0]
    if len(centres) > 1:
        return None
    return State(
        ordered,
        in_hand=frozenset(f[1] for f in facts if f[0] == "in_hand" and f[2] == 0),
        grasped=tuple(sorted((f[1], f[2]) for f in facts if f[0] == "grasped" and f[3] == 0)),
        free=frozenset(f[1] for f in facts if f[0] == "free" and f[2] == 0),
        in_centre=centres[0] if centres else None,
    )


def _format_atom(atom: Atom) -> str:
    return f"{atom[0]}({','.join(str(a) for a in atom[1:])})."


def serialize_instance(instance: Instance) -> str:
    lines = [f"#const granularity = {instance.topology.granularity_deg}."]
    if instance.horizon_limit is not None:
        lines.append(f"#const timemax = {instance.horizon_limit}.")
    for lo, hi in instance.time_ranges:
        if hi is None:
            lines.append(f"time({lo}..timemax).")
        elif lo == hi:
            lines.append(f"time({lo}).")
        else:
            lines.append(f"time({lo}..{hi}).")
    lines += [_format_atom(f) for f in instance.facts]
    return "\n".join(lines) + "\n"


def serialize_plan(plan: Plan, start: int = 0) -> str:
    """One action atom per line; timesteps are offset by ``start``.

    The simple scenario's encoding numbers actions from 1, so its plans are
    conventionally written with ``start=1``.
    """
    return "".join(f"{a.at(a.timestep + start)}\n" for a in plan)


_PLAN_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*\.?\s*")


def parse_plan(text: str) -> Plan:
    """Parse plan atoms (one or more per line, whitespace separated).

    Timesteps may start at any offset but must be consecutive; the result is
    renumbered from 0.  The historical 7-argument ``linkToCentral_take`` form
    (joint repeated) and the ``linkToCentral_Grasp`` spelling are normalized.
    """
    found = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("%", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _PLAN_ATOM.match(line, pos)
            if m is None:
                raise ParseError("expected an action atom", lineno, pos + 1)
            name, body = m.group(1), m.group(2)
            try:
                args = tuple(int(x) for x in body.split(","))
            except ValueError:
                raise ParseError(f"non-integer argument in {name}", lineno, pos + 1) from None
            if name == "linkToCentral_Grasp":
                name = "linkToCentral_take"
            if name == "linkToCentral_take" and len(args) == 7 and args[2] == args[3]:
                args = args[:3] + args[4:]
            if name not in PLAN_ARITIES:
                raise ParseError(f"unknown action {name!r}", lineno, pos + 1)
            if len(args) - 1 not in PLAN_ARITIES[name]:
                raise ParseError(f"wrong number of arguments for {name}", lineno, pos + 1)
            found.append(GroundAction(name, args[:-1], args[-1]))
            pos = m.end()
    found.sort(key=lambda a: a.timestep)
    if found:
        base = found[0].timestep
        for i, a in enumerate(found):
            if a.timestep != base + i:
                raise ParseError(f"plan timesteps are not consecutive at {a}")
    return Plan.of(found)
