"""Independent reference implementations used only by the tests.

* ``bfs_distance``: plain breadth-first search for shortest plan length.
* ``SasRules`` / ``SaesRules`` / ``MaesRules``: rule-by-rule transcriptions
  of the answer-set encodings as forward evaluators over explicit,
  timestep-indexed fact sets.  Each one enumerates every ground action atom
  over the instance's domains, keeps those whose choice-rule body and
  ``ok``-constraints hold at ``T``, and derives the facts at ``T + 1`` from
  the effect rules and frame axioms.
* Literal sets of the worked macro example and of the three macro rule
  bodies, transcribed by hand.
"""

from __future__ import annotations

from collections import deque
from itertools import product

from artiplan.domain import State, Topology
from artiplan.schemas import lits


# --- breadth-first search --------------------------------------------------------


def bfs_distance(start: State, goals, successors, limit: int = 10_000_000) -> int | None:
    """Length of a shortest action sequence reaching a goal state."""
    if start.satisfies(goals):
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, d = frontier.popleft()
        for _, nxt in successors(state):
            if nxt in seen:
                continue
            if nxt.satisfies(goals):
                return d + 1
            seen.add(nxt)
            if len(seen) > limit:
                raise RuntimeError("state space larger than the oracle limit")
            frontier.append((nxt, d + 1))
    return None


# --- shared helpers ----------------------------------------------------------------


def _ok(a, ai, g):
    """The four admissibility rules for a one-step rotation from ``ai`` to ``a``."""
    if a < ai and (a + g) % 360 == ai % 360:
        return True
    if a > ai and (ai + g) % 360 == a % 360:
        return True
    if ai == 0 and a == 360 - g:
        return True
    if a == 0 and ai == 360 - g:
        return True
    return False


def _rotated(ac, a, ap):
    return abs((ac + (a - ap)) + 360) % 360


def _at(facts, t):
    return {f for f in facts if f[-1] == t}


# --- simple scenario ----------------------------------------------------------------


class SasRules:
    """Forward evaluation of the simple-scenario encoding."""

    def __init__(self, topology: Topology):
        self.g = topology.granularity_deg
        self.joints = [0, *topology.elements]
        self.angles = list(topology.angles)
        linked = {(a, b) for a, b in topology.adjacency}
        linked.add((0, 1))
        linked |= {(b, a) for a, b in linked}  # symmetric closure
        self.linked = linked

    def facts(self, state: State, t: int = 0):
        out = {("hasAngle", 0, 0, t)}
        out |= {("hasAngle", j, a, t) for j, a in state.angle_map().items()}
        return out

    def state(self, facts, t: int) -> State:
        angle = {}
        for f in _at(facts, t):
            if f[0] == "hasAngle" and f[1] != 0:
                assert f[1] not in angle, f"two angles for joint {f[1]}"
                angle[f[1]] = f[2]
        return State(tuple(angle[j] for j in sorted(angle)))

    def candidates(self, facts, t: int):
        now = _at(facts, t)
        out = []
        for j1, j2, a, ai in product(self.joints, self.joints, self.angles, self.angles):
            body = (
                j1 > j2
                and ("hasAngle", j1, ai, t) in now
                and a != ai
                and (j1, j2) in self.linked
            )
            if body and _ok(a, ai, self.g):
                out.append(("changeAngle", j1, j2, a, ai))
        return out

    def step(self, facts, action, t: int):
        now = _at(facts, t)
        _, j2, _, a, ap = action
        nxt = set()
        affected = set()
        for f in now:
            if f[0] != "hasAngle":
                continue
            j1, ac = f[1], f[2]
            if j1 > action[1]:
                an = _rotated(ac, a, ap)
                if an in self.angles:
                    affected.add((j1, an, ac))
        nxt.add(("hasAngle", action[1], a, t + 1))
        nxt |= {("hasAngle", j, an, t + 1) for j, an, _ in affected}
        touched = {action[1]} | {j for j, _, _ in affected}
        for f in now:
            if f[0] == "hasAngle" and f[1] not in touched:
                nxt.add(("hasAngle", f[1], f[2], t + 1))
        return nxt


# --- extended scenario, elementary actions ------------------------------------------


class _Extended:
    def __init__(self, topology: Topology):
        self.g = topology.granularity_deg
        self.links = list(topology.links)
        self.joints = list(range(1, topology.num_joints + 1))
        self.grippers = list(topology.grippers)
        self.angles = list(topology.angles)
        self.connected = set(topology.adjacency)

    def facts(self, state: State, t: int = 0):
        out = {("hasAngle", l, a, t) for l, a in state.angle_map().items()}
        out |= {("in_hand", l, t) for l in state.in_hand}
        out |= {("grasped", g, l, t) for g, l in state.grasped}
        out |= {("free", g, t) for g in state.free}
        if state.in_centre is not None:
            out.add(("in_centre", state.in_centre, t))
        return out

    def state(self, facts, t: int) -> State:
        now = _at(facts, t)
        angle = {}
        for f in now:
            if f[0] == "hasAngle":
                assert f[1] not in angle, f"two angles for link {f[1]}"
                angle[f[1]] = f[2]
        centres = [f[1] for f in now if f[0] == "in_centre"]
        assert len(centres) <= 1, "several centred joints"
        return State(
            tuple(angle[l] for l in sorted(angle)),
            frozenset(f[1] for f in now if f[0] == "in_hand"),
            tuple(sorted((f[1], f[2]) for f in now if f[0] == "grasped")),
            frozenset(f[1] for f in now if f[0] == "free"),
            centres[0] if centres else None,
        )

    def _affected(self, now, l1, l2, a, ap):
        out = set()
        for f in now:
            if f[0] != "hasAngle":
                continue
            l, ac = f[1], f[2]
            if (l > l1 and l1 > l2) or (l < l1 and l1 < l2):
                an = _rotated(ac, a, ap)
                if an in self.angles:
                    out.add((l, an, ac))
        return out

    def _centre(self, now, t, new_centre):
        # in_centre is inertial and exclusive
        if new_centre is not None:
            return {("in_centre", new_centre, t + 1)}
        return {("in_centre", f[1], t + 1) for f in now if f[0] == "in_centre"}


class SaesRules(_Extended):
    """Forward evaluation of the elementary extended encoding."""

    def candidates(self, facts, t: int):
        now = _at(facts, t)
        conn = self.connected
        out = []
        for l1, j1, g2 in product(self.links, self.joints, self.grippers):
            if (
                (j1, l1) in conn
                and ("free", g2, t) in now
                and ("in_hand", l1, t) not in now
                and ("in_centre", j1, t) not in now
            ):
                out.append(("move_link_to_central", l1, j1, g2))
        for l1, l2, j1, g1, g2 in product(
            self.links, self.links, self.joints, self.grippers, self.grippers
        ):
            base = (j1, l1) in conn and (j1, l2) in conn and l1 != l2 and g1 != g2
            if not base:
                continue
            if (
                ("in_centre", j1, t) in now
                and ("free", g1, t) in now
                and ("free", g2, t) in now
                and ("in_hand", l1, t) not in now
                and ("in_hand", l2, t) not in now
            ):
                out.append(("take_links_to_move", l1, l2, j1, g1, g2))
            holding = (
                ("grasped", g2, l2, t) in now
                and ("grasped", g1, l1, t) in now
                and ("in_hand", l1, t) in now
                and ("in_hand", l2, t) in now
                and ("free", g1, t) not in now
                and ("free", g2, t) not in now
            )
            if holding:
                out.append(("release_links", l1, l2, j1, g1, g2))
            if holding and ("in_centre", j1, t) in now:
                for a1, a2 in product(self.angles, self.angles):
                    if ("hasAngle", l1, a2, t) in now and _ok(a1, a2, self.g):
                        out.append(("changeAngle", l1, l2, j1, a1, a2, g1, g2))
        return out

    def step(self, facts, action, t: int):
        now = _at(facts, t)
        name, *args = action
        nxt = set()
        new_centre = None
        changed_angle = None
        affected = set()
        if name == "move_link_to_central":
            new_centre = args[1]
        elif name == "take_links_to_move":
            l1, l2, _, g1, g2 = args
            nxt |= {("in_hand", l1, t + 1), ("in_hand", l2, t + 1)}
            nxt |= {("grasped", g1, l1, t + 1), ("grasped", g2, l2, t + 1)}
        elif name == "changeAngle":
            l1, l2, _, a1, a2, _, _ = args
            changed_angle = l1
            nxt.add(("hasAngle", l1, a1, t + 1))
            affected = self._affected(now, l1, l2, a1, a2)
            nxt |= {("hasAngle", l, an, t + 1) for l, an, _ in affected}
        elif name == "release_links":
            _, _, _, g1, g2 = args
            nxt |= {("free", g2, t + 1), ("free", g1, t + 1)}
        nxt |= self._centre(now, t, new_centre)

        touched = {l for l, _, _ in affected} | ({changed_angle} - {None})
        for f in now:
            if f[0] == "hasAngle" and f[1] not in touched:
                nxt.add(("hasAngle", f[1], f[2], t + 1))
            elif f[0] == "in_hand":
                l = f[1]
                released = name == "release_links" and l in (args[0], args[1])
                if not released:
                    nxt.add(("in_hand", l, t + 1))
            elif f[0] == "free":
                g = f[1]
                taken = name == "take_links_to_move" and g in (args[3], args[4])
                if not taken:
                    nxt.add(("free", g, t + 1))
            elif f[0] == "grasped":
                g, l = f[1], f[2]
                released = name == "release_links" and (
                    (l == args[0] and g == args[3]) or (l == args[1] and g == args[4])
                )
                if not released:
                    nxt.add(("grasped", g, l, t + 1))
        return nxt


class MaesRules(_Extended):
    """Forward evaluation of the macro-only encoding."""

    def candidates(self, facts, t: int):
        now = _at(facts, t)
        conn = self.connected
        out = []
        for l1, l2, j1, g1, g2 in product(
            self.links, self.links, self.joints, self.grippers, self.grippers
        ):
            if not ((j1, l1) in conn and (j1, l2) in conn and l1 != l2 and g1 != g2):
                continue
            if (
                ("free", g1, t) in now
                and ("free", g2, t) in now
                and ("in_centre", j1, t) not in now
                and ("in_hand", l1, t) not in now
                and ("in_hand", l2, t) not in now
            ):
                out.append(("linkToCentral_take", l1, l2, j1, g1, g2))
            for a1, a2 in product(self.angles, self.angles):
                if ("hasAngle", l1, a2, t) not in now or not _ok(a1, a2, self.g):
                    continue
                if (
                    ("in_centre", j1, t) in now
                    and ("free", g1, t) not in now
                    and ("free", g2, t) not in now
                    and ("grasped", g1, l1, t) in now
                    and ("in_hand", l1, t) in now
                    and ("in_hand", l2, t) in now
                    and ("grasped", g2, l2, t) in now
                ):
                    out.append(("changeAngle_release", l1, l2, j1, g1, g2, a1, a2))
                if (
                    ("in_centre", j1, t) in now
                    and ("free", g1, t) in now
                    and ("free", g2, t) in now
                ):
                    out.append(("grasp_changeAngle_release", l1, l2, j1, a1, a2, g1, g2))
        return out

    def step(self, facts, action, t: int):
        now = _at(facts, t)
        name, *args = action
        nxt = set()
        new_centre = None
        affected = set()
        changed = None
        if name == "linkToCentral_take":
            l1, l2, j1, g1, g2 = args
            new_centre = j1
            nxt |= {("in_hand", l1, t + 1), ("in_hand", l2, t + 1)}
            nxt |= {("grasped", g1, l1, t + 1), ("grasped", g2, l2, t + 1)}
        elif name == "changeAngle_release":
            l1, l2, _, g1, g2, a1, a2 = args
            changed = l1
            affected = self._affected(now, l1, l2, a1, a2)
            nxt.add(("hasAngle", l1, a1, t + 1))
            nxt |= {("free", g1, t + 1), ("free", g2, t + 1)}
        else:
            l1, l2, _, a1, a2, g1, g2 = args
            changed = l1
            affected = self._affected(now, l1, l2, a1, a2)
            nxt.add(("hasAngle", l1, a1, t + 1))
            nxt |= {("free", g1, t + 1), ("free", g2, t + 1)}
        nxt |= {("hasAngle", l, an, t + 1) for l, an, _ in affected}
        nxt |= self._centre(now, t, new_centre)

        touched = {l for l, _, _ in affected} | ({changed} - {None})
        rot_links = (args[0], args[1]) if name != "linkToCentral_take" else ()
        for f in now:
            if f[0] == "hasAngle" and f[1] not in touched:
                nxt.add(("hasAngle", f[1], f[2], t + 1))
            elif f[0] == "free":
                g = f[1]
                if not (name == "linkToCentral_take" and g in (args[3], args[4])):
                    nxt.add(("free", g, t + 1))
            elif f[0] == "in_hand":
                if f[1] not in rot_links:
                    nxt.add(("in_hand", f[1], t + 1))
            elif f[0] == "grasped":
                g, l = f[1], f[2]
                if name == "changeAngle_release":
                    gone = (l == args[0] and g == args[3]) or (l == args[1] and g == args[4])
                elif name == "grasp_changeAngle_release":
                    gone = (l == args[0] and g == args[5]) or (l == args[1] and g == args[6])
                else:
                    gone = False
                if not gone:
                    nxt.add(("grasped", g, l, t + 1))
        return nxt


# --- hand-transcribed literal sets ---------------------------------------------------

EXAMPLE_MACRO_PRE = lits(
    "link(L1)", "link(L2)", "joint(J1)", "gripper(G1)", "time(T)", "gripper(G2)",
    "not in_centre(J1,T)", "free(G1,T)", "free(G2,T)", "not in_hand(L1,T)",
    "not in_hand(L2,T)", "connected(J1,L1)", "connected(J1,L2)", "L1<>L2", "G1<>G2",
)
# ``free(G,T)`` of the example, instantiated for both grippers of the take action
EXAMPLE_MACRO_DEL = lits("free(G1,T)", "free(G2,T)")
EXAMPLE_MACRO_ADD = lits(
    "in_centre(J1,T)", "in_hand(L1,T)", "in_hand(L2,T)", "grasped(G1,L1,T)", "grasped(G2,L2,T)"
)

# rule bodies of the three macros; the one-step angle guard stands for the
# ``ok`` rules and their constraint
CENTRE_TAKE_RULE_BODY = lits(
    "link(L1)", "link(L2)", "joint(J1)", "gripper(G1)", "gripper(G2)", "time(T)",
    "free(G1,T)", "free(G2,T)", "not in_centre(J1,T)", "not in_hand(L1,T)",
    "not in_hand(L2,T)", "L1<>L2", "G1<>G2", "connected(J1,L1)", "connected(J1,L2)",
)
ROTATE_RELEASE_RULE_BODY = lits(
    "link(L1)", "link(L2)", "joint(J1)", "gripper(G1)", "gripper(G2)", "angle(A1)",
    "angle(A2)", "in_centre(J1,T)", "not free(G1,T)", "not free(G2,T)", "L1<>L2", "G1<>G2",
    "connected(J1,L1)", "connected(J1,L2)", "grasped(G1,L1,T)", "in_hand(L1,T)",
    "in_hand(L2,T)", "hasAngle(L1,A2,T)", "grasped(G2,L2,T)", "one_step(A1,A2)",
)
GRASP_ROTATE_RELEASE_RULE_BODY = lits(
    "link(L1)", "link(L2)", "joint(J1)", "angle(A1)", "angle(A2)", "gripper(G1)",
    "gripper(G2)", "time(T)", "in_centre(J1,T)", "free(G1,T)", "free(G2,T)",
    "connected(J1,L1)", "connected(J1,L2)", "in_centre(J1,T)", "hasAngle(L1,A2,T)",
    "time(T)", "L1<>L2", "G1<>G2", "one_step(A1,A2)",
)
# effects of the rotate-and-release macros (identical for both)
ROTATE_RELEASE_ADD = lits(
    "hasAngle(L1,A1,T)", "propagate(L1,L2,A1,A2,T)", "free(G1,T)", "free(G2,T)"
)
ROTATE_RELEASE_DEL = lits(
    "hasAngle(L1,A2,T)", "grasped(G1,L1,T)", "grasped(G2,L2,T)", "in_hand(L1,T)", "in_hand(L2,T)"
)
