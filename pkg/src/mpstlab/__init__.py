"""Workbench for multiparty session protocols.

Parse a global protocol, project it onto its participants under a
configurable merge criterion, run the resulting composition under a
synchronous, ordered-asynchronous, or unordered-asynchronous model, and
compare two semantics by depth-bounded branching bisimulation.
"""

from .config import (
    CommModel, MergeCriterion, PresetId, SemanticsConfig, config_from_json,
    config_to_json, preset, preset_names, validate_config,
)
from .equivalence import (
    BisimVerdict, Evidence, TauPolicy, bounded_traces, branching_bisim, trace_diff,
)
from .parser import NamedProtocol, ParseError, parse_global, parse_session_file, print_global, print_local
from .projection import MergeUndefined, ProjectionError, merge_locals, project, project_all
from .semantics import (
    ActionLabel, Configuration, Lts, NondeterministicLabelError, NotEnabledError,
    build_lts, enabled, enabled_local, initial, step, terminal_kind,
)
from .render import render_compositional_fsm, render_local_fsm, render_msc
from .terms import (
    CommTriple, GlobalType, LocalType, comm, participants, participants_local,
    terminated,
)
from .wellformed import (
    CheckReport, Violation, ViolationKind, check_all, check_core,
    check_gating_global, check_gating_local, check_well_branched,
    check_well_channelled,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
