"""Independent plan checking.

Preconditions and effects are evaluated straight from the schema literal
sets (:mod:`artiplan.schemas`), not through the search-time transition
functions, so a plan accepted here is confirmed by a second implementation.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .domain import Plan, Scenario, State
from .instance_io import Instance
from .macros import maes_action_set
from .schemas import (
    SAES_SCHEMAS,
    SAS_SCHEMAS,
    World,
    apply_effects,
    atoms_state,
    bind,
    first_failure,
    grounded_text,
    state_atoms,
)


class Verdict(str, enum.Enum):
    VALID = "valid"
    INVALID = "invalid"

    def __str__(self) -> str:
        return self.value


@dataclass
class ValidationReport:
    verdict: Verdict
    failing_step: int | None = None
    reason: str | None = None
    trace: list[State] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.VALID

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "failing_step": self.failing_step,
            "reason": self.reason,
            "trace": [_state_dict(s) for s in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        if self.valid:
            return f"valid ({len(self.trace) - 1} steps)"
        return f"invalid at step {self.failing_step}: {self.reason}"


def _state_dict(state: State) -> dict:
    return {
        "angles": list(state.angles),
        "in_hand": sorted(state.in_hand),
        "grasped": [list(p) for p in state.grasped],
        "free": sorted(state.free),
        "in_centre": state.in_centre,
    }


def schemas_for(encoding: Scenario) -> dict:
    encoding = Scenario(encoding)
    if encoding is Scenario.SAS:
        pool = SAS_SCHEMAS
    elif encoding is Scenario.SAES:
        pool = SAES_SCHEMAS
    else:
        pool = maes_action_set()
    return {(s.name, s.arity): s for s in pool}


def validate(instance: Instance, plan: Plan, encoding: Scenario | str) -> ValidationReport:
    encoding = Scenario(encoding)
    topo = instance.topology
    if instance.initial is None:
        return ValidationReport(Verdict.INVALID, 0, "initial state is not fully specified")
    if (instance.scenario is Scenario.SAS) != (encoding is Scenario.SAS):
        return ValidationReport(
            Verdict.INVALID, 0, f"encoding {encoding} does not match a {instance.scenario} instance"
        )
    world = World(topo)
    table = schemas_for(encoding)
    atoms = state_atoms(instance.initial, topo)
    trace = [instance.initial]

    for step, action in enumerate(plan):
        schema = table.get((action.name, len(action.args)))
        if schema is None:
            return ValidationReport(
                Verdict.INVALID, step, f"{action.name}/{len(action.args)} is not a {encoding} action", trace
            )
        binding = bind(schema, action.args)
        for var, sort in schema.params:
            if (sort, binding[var]) not in world.statics and sort != "angle":
                return ValidationReport(
                    Verdict.INVALID, step, f"{var}={binding[var]} is not a {sort}", trace
                )
        failed = first_failure(schema, binding, atoms, world)
        if failed is not None:
            reason = f"precondition {grounded_text(failed, binding, step)} of {action} does not hold"
            return ValidationReport(Verdict.INVALID, step, reason, trace)
        atoms = apply_effects(schema, binding, atoms)
        try:
            trace.append(atoms_state(atoms, topo))
        except ValueError as exc:
            return ValidationReport(Verdict.INVALID, step, f"effects of {action}: {exc}", trace)

    final = trace[-1]
    for element, angle in sorted(instance.goals.items()):
        if not 1 <= element <= topo.num_elements or final.angle(element) != angle:
            have = final.angle(element) if 1 <= element <= topo.num_elements else None
            return ValidationReport(
                Verdict.INVALID,
                len(plan),
                f"goal hasAngle({element},{angle},{len(plan)}) not reached (angle is {have})",
                trace,
            )
    return ValidationReport(Verdict.VALID, None, None, trace)
