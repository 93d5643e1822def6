"""Planning, validation and benchmarking for articulated-object manipulation."""

__version__ = "0.1.0"

from .domain import GroundAction, Plan, Scenario, State, Topology  # noqa: E402
from .instance_io import Instance, parse_instance, parse_plan  # noqa: E402
from .macros import expand  # noqa: E402
from .planner import solve  # noqa: E402
from .validator import validate  # noqa: E402

__all__ = [
    "GroundAction",
    "Instance",
    "Plan",
    "Scenario",
    "State",
    "Topology",
    "__version__",
    "expand",
    "parse_instance",
    "parse_plan",
    "solve",
    "validate",
]
