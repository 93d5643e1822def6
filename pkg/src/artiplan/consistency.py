"""Knowledge-base consistency checks.

Every check is run and every violation reported, so a single pass yields the
whole repair set.  Rule ids follow the constraint labels of the ASP checker
(``c1a`` ... ``c25``, ``c3a'`` for the extended ``hasAngle`` sort check);
``x1``-``x3`` cover gripper/centre bookkeeping at time 0 that the planner
relies on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .instance_io import Instance


@dataclass(frozen=True, order=True)
class Violation:
    rule: str
    facts: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.message} [{' '.join(self.facts)}]"


def _fmt(atom: tuple) -> str:
    return f"{atom[0]}({','.join(str(a) for a in atom[1:])})"


def possible_angles(granularity: int) -> set[int]:
    """Closure of {0} under adding ``granularity`` modulo 360."""
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = (frontier.pop() + granularity) % 360
        if nxt not in seen:
            seen.add(nxt)
            frontier.append(nxt)
    return seen


def check(instance: Instance) -> list[Violation]:
    """Return all violations, sorted; an empty list means consistent."""
    facts = instance.facts
    extended = instance.scenario.extended
    by_pred: dict[str, list[tuple]] = {}
    for f in facts:
        by_pred.setdefault(f[0], []).append(f)

    def ids(pred: str) -> set[int]:
        return {f[1] for f in by_pred.get(pred, ())}

    joints, links, grippers = ids("joint"), ids("link"), ids("gripper")
    angles = ids("angle")
    elements = links if extended else joints
    element_sort = "link" if extended else "joint"
    has_time = instance.has_time
    out: list[Violation] = []

    def bad(rule: str, atom: tuple, message: str) -> None:
        out.append(Violation(rule, (_fmt(atom),), message))

    if not extended:
        for f in by_pred.get("isLinked", ()):
            if f[1] not in joints:
                bad("c1a", f, f"isLinked endpoint {f[1]} is not a joint")
            if f[2] not in joints:
                bad("c1b", f, f"isLinked endpoint {f[2]} is not a joint")
            if f[1] == f[2]:
                bad("c2", f, f"joint {f[1]} is linked to itself")

    for f in by_pred.get("hasAngle", ()):
        if f[1] not in elements:
            rule = "c3a'" if extended else "c3a"
            bad(rule, f, f"hasAngle refers to {f[1]}, which is not a {element_sort}")
        if f[2] not in angles:
            bad("c3b", f, f"angle {f[2]} is not declared")
        if not has_time(f[3]):
            bad("c3c", f, f"time {f[3]} is not declared")

    goal_count: Counter[int] = Counter()
    for f in by_pred.get("goal", ()):
        goal_count[f[1]] += 1
        if f[1] not in elements or (not extended and f[1] == 0):
            # the hidden reference joint 0 never moves, so it cannot carry a goal
            bad("c4a", f, f"goal refers to {f[1]}, which is not a {element_sort}")
        if f[2] not in angles:
            bad("c4b", f, f"goal angle {f[2]} is not declared")

    for e in sorted(elements):
        if goal_count[e] > 1:
            goals = tuple(_fmt(f) for f in by_pred["goal"] if f[1] == e)
            out.append(Violation("c6", goals, f"{element_sort} {e} has more than one goal"))
        starts = [f for f in by_pred.get("hasAngle", ()) if f[1] == e and f[3] == 0]
        if len(starts) != 1:
            out.append(
                Violation(
                    "c8",
                    tuple(_fmt(f) for f in starts),
                    f"{element_sort} {e} has {len(starts)} starting angles, expected exactly one",
                )
            )

    if not has_time(0):
        out.append(Violation("c9", (), "time step 0 is not declared"))
    if 0 not in angles:
        out.append(Violation("c10", (), "angle(0) is missing"))

    possible = possible_angles(instance.topology.granularity_deg)
    for a in sorted(possible - angles):
        out.append(Violation("c13", (f"angle({a})",), f"admissible angle {a} is not declared"))
    for a in sorted(angles - possible):
        out.append(
            Violation("c14", (f"angle({a})",), f"angle {a} is not a multiple of the granularity")
        )

    if extended:
        _extended_checks(by_pred, joints, links, grippers, has_time, bad)

    out.extend(_bookkeeping(instance, by_pred))
    return sorted(set(out), key=lambda v: (_rule_key(v.rule), v.facts, v.message))


def _extended_checks(by_pred, joints, links, grippers, has_time, bad) -> None:
    for f in by_pred.get("connected", ()):
        if f[1] not in joints:
            bad("c15", f, f"connected refers to {f[1]}, which is not a joint")
        if f[2] not in links:
            bad("c16", f, f"connected refers to {f[2]}, which is not a link")
    for f in by_pred.get("in_centre", ()):
        if f[1] not in joints:
            bad("c17", f, f"in_centre refers to {f[1]}, which is not a joint")
        if not has_time(f[2]):
            bad("c18", f, f"time {f[2]} is not declared")
    for f in by_pred.get("in_hand", ()):
        if f[1] not in links:
            bad("c19", f, f"in_hand refers to {f[1]}, which is not a link")
        if not has_time(f[2]):
            bad("c20", f, f"time {f[2]} is not declared")
    for f in by_pred.get("grasped", ()):
        if f[1] not in grippers:
            bad("c21", f, f"grasped refers to {f[1]}, which is not a gripper")
        if f[2] not in links:
            bad("c22", f, f"grasped refers to {f[2]}, which is not a link")
        if not has_time(f[3]):
            bad("c23", f, f"time {f[3]} is not declared")
    for f in by_pred.get("free", ()):
        if f[1] not in grippers:
            bad("c24", f, f"free refers to {f[1]}, which is not a gripper")
        if not has_time(f[2]):
            bad("c25", f, f"time {f[2]} is not declared")


def _bookkeeping(instance: Instance, by_pred) -> list[Violation]:
    if not instance.scenario.extended:
        return []
    out = []
    centres = [f for f in by_pred.get("in_centre", ()) if f[2] == 0]
    if len(centres) > 1:
        out.append(
            Violation("x1", tuple(_fmt(f) for f in centres), "more than one joint is centred")
        )
    free = {f[1] for f in by_pred.get("free", ()) if f[2] == 0}
    grasps = [f for f in by_pred.get("grasped", ()) if f[3] == 0]
    holding = Counter(f[1] for f in grasps)
    for f in grasps:
        if f[1] in free:
            out.append(Violation("x2", (_fmt(f),), f"gripper {f[1]} is both free and grasping"))
        elif holding[f[1]] > 1:
            out.append(Violation("x2", (_fmt(f),), f"gripper {f[1]} grasps more than one link"))
    held = {f[2] for f in grasps}
    for f in by_pred.get("in_hand", ()):
        if f[2] == 0 and f[1] not in held:
            out.append(Violation("x3", (_fmt(f),), f"link {f[1]} is in hand but not grasped"))
    for link in sorted(held - {f[1] for f in by_pred.get("in_hand", ()) if f[2] == 0}):
        out.append(Violation("x3", (f"in_hand({link},0)",), f"link {link} is grasped but not in hand"))
    return out


def _rule_key(rule: str):
    digits = "".join(ch for ch in rule if ch.isdigit())
    return (rule[0], int(digits or 0), rule)


def is_consistent(instance: Instance) -> bool:
    return not check(instance)
