"""tmkit: a thinging-machine modeling toolkit.

Parse textual models, validate them against the five-stage flow
calculus, reason about events and chronologies, execute behaviors with
token semantics, and detect duplicated functionality between models via
labeled-graph isomorphism.
"""

from .behavior import (
    OverlapAmbiguityError,
    UnknownGoalError,
    check_behavior,
    check_event_region,
    infer_dependencies,
    nonfunctional_events,
)
from .diagnostics import Diagnostic, Severity, SourceSpan, TMError
from .dsl import ParseError, format_model, parse
from .match import (
    AmbiguousSpliceError,
    MatchPolicy,
    NodeMapping,
    SimplifiedGraph,
    canonical_signature,
    find_shared_functionality,
    isomorphic,
    simplify,
    verify_mapping,
)
from .model import (
    AssemblyError,
    BehaviorGraph,
    DanglingRefError,
    DuplicateArcError,
    DuplicatePathError,
    Event,
    FlowArc,
    StageKind,
    StageRef,
    Thimac,
    TMModel,
    TriggerArc,
    UnknownParentError,
    assemble_model,
)
from .render import RenderOptions, to_dot
from .sim import (
    ConfigError,
    ExploreConfig,
    ExploreResult,
    NoInitialEventsError,
    SimConfig,
    Trace,
    explore_state_space,
    simulate,
)
from .validate import check_static, flow_adjacency_legal

__version__ = "0.1.0"

__all__ = [
    "AmbiguousSpliceError",
    "AssemblyError",
    "BehaviorGraph",
    "ConfigError",
    "DanglingRefError",
    "Diagnostic",
    "DuplicateArcError",
    "DuplicatePathError",
    "Event",
    "ExploreConfig",
    "ExploreResult",
    "FlowArc",
    "MatchPolicy",
    "NoInitialEventsError",
    "NodeMapping",
    "OverlapAmbiguityError",
    "ParseError",
    "RenderOptions",
    "Severity",
    "SimConfig",
    "SimplifiedGraph",
    "SourceSpan",
    "StageKind",
    "StageRef",
    "TMError",
    "TMModel",
    "Thimac",
    "Trace",
    "TriggerArc",
    "UnknownGoalError",
    "UnknownParentError",
    "assemble_model",
    "canonical_signature",
    "check_behavior",
    "check_event_region",
    "check_static",
    "explore_state_space",
    "find_shared_functionality",
    "flow_adjacency_legal",
    "format_model",
    "infer_dependencies",
    "isomorphic",
    "nonfunctional_events",
    "parse",
    "simplify",
    "simulate",
    "to_dot",
    "verify_mapping",
]
