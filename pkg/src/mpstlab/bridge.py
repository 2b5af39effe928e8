"""JSON request/response seam between the core and user interfaces.

Stateless and transport-agnostic: each request carries everything needed,
including full configuration states for stepping, so two identical requests
get identical responses.  Served over HTTP by the command-line front end;
equally usable in-process.

Step-by-step states travel by value: the display part of a configuration
holds printed locals, while the machine part rides along as an opaque token
(the UI never recomputes semantics and locals are never re-parsed).
"""

from __future__ import annotations

import json
from importlib import resources

from .config import SemanticsConfig, config_from_json, config_to_json, preset, preset_names
from .equivalence import branching_bisim
from .examples import example_text, list_examples
from .parser import ParseError, parse_global, print_global, print_local
from .projection import ProjectionError, project_all
from .render import render_compositional_fsm, render_local_fsm, render_msc
from .semantics import (
    BagBuffer, Configuration, FifoBuffer, NotEnabledError,
    NondeterministicLabelError, SyncBuffer, build_lts, enabled, initial, step,
    terminal_kind,
)
from .terms import CommTriple, local_from_obj, local_to_obj, participants
from .wellformed import check_all, check_core
from .config import validate_config

OPS = (
    "parse", "check", "project", "msc", "localsFsm", "lts",
    "enabled", "step", "bisim", "examples", "presets",
)


class BridgeError(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.extra = extra

    @classmethod
    def from_projection(cls, error: ProjectionError) -> "BridgeError":
        info = error.to_json()
        info.pop("kind")
        info.pop("message")
        return cls(error.kind, error.message, **info)

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, **self.extra}


def buffer_to_json(buffer) -> dict:
    return buffer.to_json()


def buffer_from_json(obj: dict):
    model = obj["model"]
    if model == "sync":
        return SyncBuffer()
    if model == "orderedAsync":
        queues = tuple(sorted(
            ((q["from"], q["to"]), tuple(q["labels"])) for q in obj["queues"]
        ))
        return FifoBuffer(queues)
    if model == "unorderedAsync":
        messages = tuple(sorted(
            (CommTriple(m["from"], m["to"], m["label"]), m["count"])
            for m in obj["messages"]
        ))
        return BagBuffer(messages)
    raise BridgeError("BadRequest", f"unknown buffer model {model!r}")


def state_to_json(state: Configuration) -> dict:
    return {
        "locals": {p: print_local(l) for p, l in state.session},
        "buffer": buffer_to_json(state.buffer),
        "token": {
            "locals": {p: local_to_obj(l) for p, l in state.session},
            "envs": {
                p: {v: local_to_obj(l) for v, l in bindings}
                for p, bindings in state.envs
            },
            "buffer": buffer_to_json(state.buffer),
        },
    }


def state_from_json(obj: dict) -> Configuration:
    try:
        token = obj["token"]
        locals_ = {p: local_from_obj(l) for p, l in token["locals"].items()}
        envs = {
            p: {v: local_from_obj(l) for v, l in bindings.items()}
            for p, bindings in token.get("envs", {}).items()
        }
        buffer = buffer_from_json(token["buffer"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BridgeError("BadRequest", f"malformed configuration state: {exc}") from exc
    return Configuration.make(locals_, buffer, envs)


def _parse_session(req: dict):
    text = req.get("session")
    if not isinstance(text, str):
        raise BridgeError("BadRequest", "missing required field 'session'")
    return parse_global(text)


def _config(req: dict, key: str) -> SemanticsConfig:
    obj = req.get(key)
    if obj is None:
        raise BridgeError("BadRequest", f"missing required field {key!r}")
    try:
        return config_from_json(obj)
    except (ValueError, TypeError) as exc:
        raise BridgeError("BadRequest", f"bad {key}: {exc}") from exc


def _require_core(g) -> None:
    report = check_core(g)
    if not report.ok:
        raise BridgeError(
            "CheckViolations",
            "; ".join(v.message for v in report.violations),
            violations=[v.to_json() for v in report.violations],
        )


def _locals_or_error(g, cfg: SemanticsConfig):
    try:
        return project_all(g, cfg), None
    except ProjectionError as exc:
        return None, exc


def _state_payload(state: Configuration, cfg: SemanticsConfig) -> dict:
    moves = enabled(state, cfg)
    return {
        "state": state_to_json(state),
        "labels": [
            {"label": str(label), "successor": state_to_json(succ)}
            for label, succ in moves
        ],
        "terminal": terminal_kind(state, cfg),
    }


def _handle_parse(req: dict) -> dict:
    g = _parse_session(req)
    return {"global": print_global(g), "participants": sorted(participants(g))}


def _handle_check(req: dict) -> dict:
    g = _parse_session(req)
    cfg = _config(req, "configA")
    report = check_all(g, cfg)
    return {
        "violations": [v.to_json() for v in report.violations],
        "warnings": validate_config(cfg),
    }


def _handle_project(req: dict) -> dict:
    g = _parse_session(req)
    _require_core(g)
    cfg = _config(req, "configA")
    locals_, error = _locals_or_error(g, cfg)
    if error is not None:
        raise BridgeError.from_projection(error)
    return {"locals": {p: print_local(l) for p, l in locals_.items()}}


def _handle_msc(req: dict) -> dict:
    g = _parse_session(req)
    _require_core(g)
    return {"mermaid": render_msc(g)}


def _handle_locals_fsm(req: dict) -> dict:
    g = _parse_session(req)
    _require_core(g)
    cfg = _config(req, "configA")
    locals_, error = _locals_or_error(g, cfg)
    if error is not None:
        raise BridgeError.from_projection(error)
    return {"dots": {p: render_local_fsm(p, l) for p, l in locals_.items()}}


def _handle_lts(req: dict) -> dict:
    g = _parse_session(req)
    _require_core(g)
    cfg = _config(req, "configA")
    locals_, error = _locals_or_error(g, cfg)
    if error is not None:
        raise BridgeError.from_projection(error)
    lts = build_lts(locals_, cfg)
    return {
        "stateCount": len(lts.states),
        "edgeCount": len(lts.edges),
        "truncated": lts.truncated,
        "dot": render_compositional_fsm(lts),
    }


def _handle_enabled(req: dict) -> dict:
    cfg = _config(req, "configA")
    if req.get("state") is not None:
        state = state_from_json(req["state"])
    else:
        g = _parse_session(req)
        _require_core(g)
        locals_, error = _locals_or_error(g, cfg)
        if error is not None:
            raise BridgeError.from_projection(error)
        state = initial(locals_, cfg)
    return _state_payload(state, cfg)


def _handle_step(req: dict) -> dict:
    cfg = _config(req, "configA")
    if req.get("state") is None:
        raise BridgeError("BadRequest", "missing required field 'state'")
    if not isinstance(req.get("label"), str):
        raise BridgeError("BadRequest", "missing required field 'label'")
    state = state_from_json(req["state"])
    try:
        succ = step(state, req["label"], cfg)
    except NotEnabledError as exc:
        raise BridgeError("NotEnabled", str(exc)) from exc
    except NondeterministicLabelError as exc:
        raise BridgeError("NondeterministicLabel", str(exc)) from exc
    return _state_payload(succ, cfg)


def _handle_bisim(req: dict) -> dict:
    g = _parse_session(req)
    _require_core(g)
    cfg_a = _config(req, "configA")
    cfg_b = _config(req, "configB")
    sides = {}
    ltss = {}
    for name, cfg in (("a", cfg_a), ("b", cfg_b)):
        locals_, error = _locals_or_error(g, cfg)
        if error is not None:
            sides[name] = {"error": error.to_json()}
        else:
            sides[name] = {"locals": {p: print_local(l) for p, l in locals_.items()}}
            ltss[name] = build_lts(locals_, cfg)
    verdict = None
    if len(ltss) == 2:
        verdict = branching_bisim(ltss["a"], ltss["b"], depth=cfg_a.bisim_depth_bound).to_json()
    return {"a": sides["a"], "b": sides["b"], "verdict": verdict}


def _handle_examples(req: dict) -> dict:
    return {
        "examples": [
            {"name": name, "session": example_text(name)}
            for name in list_examples()
        ]
    }


def _handle_presets(req: dict) -> dict:
    return {"presets": {name: config_to_json(preset(name)) for name in preset_names()}}


_HANDLERS = {
    "parse": _handle_parse,
    "check": _handle_check,
    "project": _handle_project,
    "msc": _handle_msc,
    "localsFsm": _handle_locals_fsm,
    "lts": _handle_lts,
    "enabled": _handle_enabled,
    "step": _handle_step,
    "bisim": _handle_bisim,
    "examples": _handle_examples,
    "presets": _handle_presets,
}


def handle(req: dict) -> dict:
    """Dispatch one bridge request; never raises for protocol-level trouble."""
    if not isinstance(req, dict):
        return {"ok": False, "payload": None,
                "error": {"kind": "BadRequest", "message": "request must be a JSON object"}}
    op = req.get("op")
    if op not in _HANDLERS:
        return {"ok": False, "payload": None,
                "error": {"kind": "BadRequest", "message": f"unknown op {op!r}"}}
    try:
        payload = _HANDLERS[op](req)
    except BridgeError as exc:
        return {"ok": False, "payload": None, "error": exc.to_json()}
    except ParseError as exc:
        return {"ok": False, "payload": None, "error": {
            "kind": "ParseError", "message": exc.message,
            "line": exc.line, "column": exc.column,
            "expected": exc.expected,
        }}
    except Exception as exc:  # a response is still owed to the client
        return {"ok": False, "payload": None, "error": {
            "kind": "InternalError", "message": f"{type(exc).__name__}: {exc}",
        }}
    return {"ok": True, "payload": payload, "error": None}


def load_schema() -> dict:
    """The JSON Schema document the bridge traffic conforms to."""
    text = (resources.files("mpstlab.schemas") / "bridge.schema.json").read_text("utf-8")
    return json.loads(text)
