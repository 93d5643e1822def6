"""State generators shared by the property and acceptance tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from artiplan.domain import Scenario, State, Topology


def random_state(rng: random.Random, topology: Topology) -> State:
    """A bookkeeping-consistent state: each gripper is free or holds its own link."""
    angles = tuple(rng.choice(topology.angles) for _ in topology.elements)
    if not topology.scenario.extended:
        return State(angles)
    links = list(topology.links)
    rng.shuffle(links)
    grasped, free = [], set()
    for g in topology.grippers:
        if links and rng.random() < 0.5:
            grasped.append((g, links.pop()))
        else:
            free.add(g)
    centre = rng.choice([None, *range(1, topology.num_joints + 1)])
    return State(
        angles,
        frozenset(l for _, l in grasped),
        tuple(sorted(grasped)),
        frozenset(free),
        centre,
    )


@st.composite
def topologies(draw, scenario=None, max_elements=6, granularities=(45, 60, 90, 120)):
    scenario = draw(st.sampled_from(list(Scenario))) if scenario is None else Scenario(scenario)
    n = draw(st.integers(2, max_elements))
    return Topology.chain(scenario, n, draw(st.sampled_from(granularities)))


@st.composite
def states(draw, topology: Topology):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_state(random.Random(seed), topology)
