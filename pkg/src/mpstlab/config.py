"""Feature selection for one semantics, plus the bundled presets.

A SemanticsConfig fixes the merge criterion, the communication model, which
constructs are allowed, and which extra well-formedness requirements run.
Comparisons always involve two of these.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace


class MergeCriterion(str, enum.Enum):
    PLAIN = "plain"
    FULL = "full"


class CommModel(str, enum.Enum):
    SYNC = "sync"
    ORDERED = "orderedAsync"
    UNORDERED = "unorderedAsync"


@dataclass(frozen=True)
class SemanticsConfig:
    merge: MergeCriterion = MergeCriterion.PLAIN
    comm_model: CommModel = CommModel.SYNC
    allow_parallel: bool = True
    allow_fixed_point: bool = True
    allow_kleene_star: bool = True
    require_well_branched: bool = False
    require_well_channelled: bool = False
    exploration_max_states: int = 10000
    bisim_depth_bound: int = 100

    def __post_init__(self):
        if self.exploration_max_states < 1:
            raise ValueError("explorationMaxStates must be positive")
        if self.bisim_depth_bound < 1:
            raise ValueError("bisimDepthBound must be positive")

    def with_overrides(self, **kwargs) -> "SemanticsConfig":
        return replace(self, **kwargs)


_JSON_FIELDS = {
    "merge": "merge",
    "commModel": "comm_model",
    "allowParallel": "allow_parallel",
    "allowFixedPoint": "allow_fixed_point",
    "allowKleeneStar": "allow_kleene_star",
    "requireWellBranched": "require_well_branched",
    "requireWellChannelled": "require_well_channelled",
    "explorationMaxStates": "exploration_max_states",
    "bisimDepthBound": "bisim_depth_bound",
}


def config_to_json(c: SemanticsConfig) -> dict:
    return {
        "merge": c.merge.value,
        "commModel": c.comm_model.value,
        "allowParallel": c.allow_parallel,
        "allowFixedPoint": c.allow_fixed_point,
        "allowKleeneStar": c.allow_kleene_star,
        "requireWellBranched": c.require_well_branched,
        "requireWellChannelled": c.require_well_channelled,
        "explorationMaxStates": c.exploration_max_states,
        "bisimDepthBound": c.bisim_depth_bound,
    }


def config_from_json(obj: dict) -> SemanticsConfig:
    kwargs = {}
    for key, value in obj.items():
        if key not in _JSON_FIELDS:
            raise ValueError(f"unknown config field {key!r}")
        kwargs[_JSON_FIELDS[key]] = value
    if "merge" in kwargs:
        kwargs["merge"] = MergeCriterion(kwargs["merge"])
    if "comm_model" in kwargs:
        kwargs["comm_model"] = CommModel(kwargs["comm_model"])
    return SemanticsConfig(**kwargs)


class PresetId(str, enum.Enum):
    VERY_GENTLE_INTRO_MPST = "VeryGentleIntroMPST"
    GENTLE_INTRO_MP_ASYNC_ST = "GentleIntroMPAsyncST"
    API_GEN_IN_SCALA3 = "APIGenInScala3"
    ST4MP = "ST4MP"
    UNORDERED_CHOREO = "UnorderedChoreo"


_PRESETS = {
    # Source allows both merges; we default to the more permissive full merge.
    PresetId.VERY_GENTLE_INTRO_MPST: SemanticsConfig(
        merge=MergeCriterion.FULL,
        comm_model=CommModel.SYNC,
        allow_parallel=False,
        allow_fixed_point=True,
        allow_kleene_star=False,
    ),
    PresetId.GENTLE_INTRO_MP_ASYNC_ST: SemanticsConfig(
        merge=MergeCriterion.PLAIN,
        comm_model=CommModel.ORDERED,
        allow_parallel=False,
        allow_fixed_point=True,
        allow_kleene_star=False,
    ),
    PresetId.API_GEN_IN_SCALA3: SemanticsConfig(
        merge=MergeCriterion.PLAIN,
        comm_model=CommModel.ORDERED,
        allow_parallel=True,
        allow_fixed_point=False,
        allow_kleene_star=False,
        require_well_channelled=True,
    ),
    PresetId.ST4MP: SemanticsConfig(
        merge=MergeCriterion.PLAIN,
        comm_model=CommModel.ORDERED,
        allow_parallel=True,
        allow_fixed_point=True,
        allow_kleene_star=True,
        require_well_channelled=True,
    ),
    # The unordered-asynchronous source fixes only its communication model;
    # the remaining features are filled with the most permissive values.
    PresetId.UNORDERED_CHOREO: SemanticsConfig(
        merge=MergeCriterion.FULL,
        comm_model=CommModel.UNORDERED,
        allow_parallel=True,
        allow_fixed_point=True,
        allow_kleene_star=True,
    ),
}


def preset(preset_id: PresetId | str) -> SemanticsConfig:
    """The configuration a named preset stands for."""
    return _PRESETS[PresetId(preset_id)]


def preset_names() -> list[str]:
    return [p.value for p in PresetId]


def validate_config(c: SemanticsConfig) -> list[str]:
    """Warnings for odd but legal feature combinations."""
    warnings = []
    if not c.allow_fixed_point and not c.allow_kleene_star:
        warnings.append("no recursion scheme enabled: recursive sessions will be rejected")
    if c.comm_model is CommModel.UNORDERED:
        warnings.append(
            "unordered-asynchronous source leaves merge, parallel composition and "
            "recursion unspecified; permissive defaults are in effect"
        )
    return warnings
