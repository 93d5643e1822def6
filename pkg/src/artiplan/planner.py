"""Shortest-plan search by iterative deepening, plus the execution-time goal
checker.

For each horizon ``H = 0, 1, ...`` a depth-first search looks for a plan of
exactly ``H`` actions.  Two prunings keep it fast without losing optimality:

* a per-horizon table of the largest remaining budget each state was already
  explored with (a revisit with no more budget cannot succeed, because every
  shorter horizon has already failed);
* admissible lower bounds on the number of remaining actions.
"""

from __future__ import annotations

import enum
import time
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import macros, saes, sas
from .consistency import check
from .domain import GroundAction, Plan, Scenario, State, Topology, step_distance
from .instance_io import Instance

Clock = Callable[[], float]


class Outcome(str, enum.Enum):
    PLAN = "plan"
    UNSAT = "unsat"
    TIMEOUT = "timeout"

    def __str__(self) -> str:
        return self.value


class InconsistentInstance(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"instance is inconsistent: {lines}")


class EncodingMismatch(ValueError):
    pass


@dataclass
class SearchStats:
    expanded: int = 0
    elapsed: float = 0.0
    horizons: int = 0


@dataclass
class SolveResult:
    outcome: Outcome
    plan: Plan | None
    horizon: int
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.outcome is Outcome.PLAN


class _Timeout(Exception):
    pass


Successors = Callable[[State], Iterator[tuple[tuple, State]]]


def successor_function(topology: Topology, encoding: Scenario, mixed: bool = False) -> Successors:
    encoding = Scenario(encoding)
    if encoding is Scenario.SAS:
        return lambda s: sas.successors_sas(s, topology)
    if encoding is Scenario.SAES:
        return lambda s: saes.successors_saes(s, topology)
    return lambda s: macros.successors_maes(s, topology, mixed)


def check_encoding(instance: Instance, encoding: Scenario) -> Scenario:
    encoding = Scenario(encoding)
    if (instance.scenario is Scenario.SAS) != (encoding is Scenario.SAS):
        raise EncodingMismatch(
            f"a {instance.scenario.value} instance cannot be solved with the {encoding.value} encoding"
        )
    return encoding


# --- lower bounds ---------------------------------------------------------------


def _relative_gap(state: State, goals, granularity: int, with_reference: bool):
    """Per-joint step distances between current and goal relative angles, for
    consecutive elements that both have goals."""
    gaps = {}
    angles = state.angles
    for e in range(1, len(angles) + 1):
        prev = e - 1
        if prev == 0:
            if not with_reference or e not in goals:
                continue
            cur, want = angles[0], goals[e]
        else:
            if e not in goals or prev not in goals:
                continue
            cur = angles[e - 1] - angles[prev - 1]
            want = goals[e] - goals[prev]
        d = step_distance(cur % 360, want % 360, granularity)
        if d:
            gaps[e] = d
    return gaps


@lru_cache(maxsize=256)
def _standard_chain(topology: Topology) -> bool:
    return topology.is_standard_chain


def lower_bound(state: State, instance: Instance, encoding: Scenario) -> int:
    """Admissible estimate of the remaining number of actions."""
    topo = instance.topology
    goals = instance.goals
    mismatch = not state.satisfies(goals)
    if not mismatch:
        return 0
    if not _standard_chain(topo):
        return 1
    g = topo.granularity_deg
    if encoding is Scenario.SAS:
        # each rotation changes exactly one relative angle by one step
        return max(1, sum(_relative_gap(state, goals, g, True).values()))

    # extended chain: joint j sits between links j and j+1
    gaps = _relative_gap(state, goals, g, False)
    work = {e - 1 for e in gaps}
    rotations = max(1, sum(gaps.values()))
    uncentred = len(work - {state.in_centre})
    if encoding is Scenario.MAES:
        return rotations + uncentred

    # a pair may stay grasped after the centre has moved elsewhere
    held = {j for j in work if j + 1 in state.in_hand and j in state.in_hand}
    takes = len(work - held)
    releases = 0
    if len(topo.grippers) == 2 and takes:
        releases = takes - 1 + (1 if state.grasped else 0)
    return rotations + uncentred + takes + releases


# --- search ------------------------------------------------------------------------


def solve(
    instance: Instance,
    encoding: Scenario | str,
    max_horizon: int = 64,
    time_budget: float | None = None,
    *,
    clock: Clock = time.perf_counter,
    mixed: bool = False,
    use_bounds: bool = True,
) -> SolveResult:
    """Find a shortest plan (in the encoding's action vocabulary).

    Raises :class:`InconsistentInstance` if the instance fails the
    consistency checks and :class:`EncodingMismatch` if the encoding does not
    fit the instance's fact shape.
    """
    violations = check(instance)
    if violations:
        raise InconsistentInstance(violations)
    encoding = check_encoding(instance, encoding)
    start = clock()
    stats = SearchStats()

    def out_of_time() -> bool:
        return time_budget is not None and clock() - start >= time_budget

    if out_of_time():
        stats.elapsed = clock() - start
        return SolveResult(Outcome.TIMEOUT, None, 0, stats)

    successors = successor_function(instance.topology, encoding, mixed)
    goals = instance.goals
    bound = (
        (lambda s: lower_bound(s, instance, encoding))
        if use_bounds and not mixed
        else (lambda s: 0 if s.satisfies(goals) else 1)
    )
    children: dict[State, list[tuple[tuple, State]]] = {}

    def expand(state: State):
        cached = children.get(state)
        if cached is None:
            stats.expanded += 1
            seen = set()
            cached = []
            for action, nxt in successors(state):
                if nxt not in seen:
                    seen.add(nxt)
                    cached.append((action, nxt))
            if len(children) < 200_000:
                children[state] = cached
        return cached

    horizon = 0
    try:
        for horizon in range(0, max_horizon + 1):
            stats.horizons += 1
            best: dict[State, int] = {}
            path: list[tuple] = []

            def dfs(state: State, remaining: int) -> bool:
                if out_of_time():
                    raise _Timeout
                if remaining == 0:
                    return state.satisfies(goals)
                if bound(state) > remaining:
                    return False
                prev = best.get(state)
                if prev is not None and prev >= remaining:
                    return False
                best[state] = remaining
                for action, nxt in expand(state):
                    path.append(action)
                    if dfs(nxt, remaining - 1):
                        return True
                    path.pop()
                return False

            if dfs(instance.initial, horizon):
                stats.elapsed = clock() - start
                return SolveResult(Outcome.PLAN, Plan.of(path), horizon, stats)
    except _Timeout:
        stats.elapsed = clock() - start
        return SolveResult(Outcome.TIMEOUT, None, horizon, stats)
    stats.elapsed = clock() - start
    return SolveResult(Outcome.UNSAT, None, max_horizon, stats)


# --- goal checker ------------------------------------------------------------------


class OffGridObservation(ValueError):
    """An observed angle the knowledge base cannot represent."""


@dataclass(frozen=True)
class Ok:
    expected: State


@dataclass(frozen=True)
class NeedsReplan:
    instance: Instance
    expected: State


def simulate(instance: Instance, plan: Plan, encoding: Scenario, steps: int | None = None) -> State:
    """State after the first ``steps`` actions (all of them by default)."""
    encoding = check_encoding(instance, encoding)
    topo = instance.topology
    state = instance.initial
    for action in list(plan)[: len(plan) if steps is None else steps]:
        state = apply_ground(state, action, topo, encoding)
    return state


def apply_ground(state: State, action: GroundAction, topology: Topology, encoding: Scenario) -> State:
    if encoding is Scenario.SAS:
        return sas.apply_sas(state, sas.from_ground(action), topology)
    if action.name in macros.MACRO_TYPES:
        return macros.apply_maes(state, macros.from_ground(action), topology)
    return saes.apply_saes(state, saes.from_ground(action), topology)


def goal_check(
    observed: State,
    plan: Plan,
    step: int,
    instance: Instance,
    encoding: Scenario | str,
) -> Ok | NeedsReplan:
    """Compare an observed state with the state the plan predicts at ``step``."""
    if not 0 <= step <= len(plan):
        raise ValueError(f"step {step} outside 0..{len(plan)}")
    topo = instance.topology
    if len(observed.angles) != topo.num_elements:
        raise OffGridObservation(
            f"observed {len(observed.angles)} angles, expected {topo.num_elements}"
        )
    for e, a in observed.angle_map().items():
        if a not in topo.angles:
            raise OffGridObservation(
                f"element {e} observed at {a}, which granularity {topo.granularity_deg} cannot represent"
            )
    expected = simulate(instance, plan, Scenario(encoding), step)
    if observed == expected:
        return Ok(expected)
    return NeedsReplan(instance.with_initial(observed), expected)
