"""Command-line front end.

Every analysis goes through the bridge, so `--json` output is exactly the
bridge response and text mode renders the same payloads.  Exit status: 0 on
success, 1 when checks, projection, replay, or comparison fail, 2 for usage
and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bridge
from .config import CommModel, MergeCriterion, SemanticsConfig, config_to_json, preset, preset_names
from .examples import example_text, list_examples
from .parser import ParseError, parse_session_file, print_global

_COMM_NAMES = {
    "sync": CommModel.SYNC,
    "ordered": CommModel.ORDERED,
    "orderedAsync": CommModel.ORDERED,
    "unordered": CommModel.UNORDERED,
    "unorderedAsync": CommModel.UNORDERED,
}


class UsageError(Exception):
    pass


def build_config(preset_name, merge=None, comm=None, allow_par=None, allow_rec=None,
                 allow_star=None, well_branched=None, well_channelled=None,
                 max_states=None, depth=None) -> SemanticsConfig:
    """A preset (or the defaults) with explicit flag overrides applied."""
    cfg = preset(preset_name) if preset_name else SemanticsConfig()
    overrides = {}
    if merge is not None:
        overrides["merge"] = MergeCriterion(merge)
    if comm is not None:
        overrides["comm_model"] = _COMM_NAMES[comm]
    if allow_par is not None:
        overrides["allow_parallel"] = allow_par
    if allow_rec is not None:
        overrides["allow_fixed_point"] = allow_rec
    if allow_star is not None:
        overrides["allow_kleene_star"] = allow_star
    if well_branched is not None:
        overrides["require_well_branched"] = well_branched
    if well_channelled is not None:
        overrides["require_well_channelled"] = well_channelled
    if max_states is not None:
        overrides["exploration_max_states"] = max_states
    if depth is not None:
        overrides["bisim_depth_bound"] = depth
    return cfg.with_overrides(**overrides) if overrides else cfg


def parse_semantics_spec(spec: str) -> SemanticsConfig:
    """Compact one-argument form: "Preset" or "[Preset,]key=value,..."

    Keys: merge, comm, par, rec, star, wellBranched, wellChannelled,
    maxStates, depth.
    """
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty semantics spec")
    kwargs = {}
    preset_name = None
    start = 0
    if "=" not in parts[0]:
        preset_name = parts[0]
        if preset_name not in preset_names():
            raise UsageError(
                f"unknown preset {preset_name!r}; expected one of " + ", ".join(preset_names()))
        start = 1
    bool_keys = {"par": "allow_par", "rec": "allow_rec", "star": "allow_star",
                 "wellBranched": "well_branched", "wellChannelled": "well_channelled"}
    for part in parts[start:]:
        if "=" not in part:
            raise UsageError(f"expected key=value in semantics spec, got {part!r}")
        key, value = part.split("=", 1)
        key, value = key.strip(), value.strip()
        if key == "merge":
            kwargs["merge"] = value
        elif key == "comm":
            if value not in _COMM_NAMES:
                raise UsageError(f"unknown communication model {value!r}")
            kwargs["comm"] = value
        elif key in bool_keys:
            if value not in ("true", "false"):
                raise UsageError(f"{key} takes true or false, got {value!r}")
            kwargs[bool_keys[key]] = value == "true"
        elif key == "maxStates":
            kwargs["max_states"] = int(value)
        elif key == "depth":
            kwargs["depth"] = int(value)
        else:
            raise UsageError(f"unknown semantics key {key!r}")
    try:
        return build_config(preset_name, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_semantics_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--preset", choices=preset_names(), help="start from a named preset")
    sub.add_argument("--merge", choices=["plain", "full"])
    sub.add_argument("--comm", choices=sorted(_COMM_NAMES), help="communication model")
    sub.add_argument("--allow-par", action=argparse.BooleanOptionalAction, default=None,
                     help="permit parallel composition")
    sub.add_argument("--allow-rec", action=argparse.BooleanOptionalAction, default=None,
                     help="permit fixed-point recursion")
    sub.add_argument("--allow-star", action=argparse.BooleanOptionalAction, default=None,
                     help="permit the star operator")
    sub.add_argument("--require-well-branched", action=argparse.BooleanOptionalAction,
                     default=None, dest="well_branched")
    sub.add_argument("--require-well-channelled", action=argparse.BooleanOptionalAction,
                     default=None, dest="well_channelled")
    sub.add_argument("--max-states", type=int, default=None)
    sub.add_argument("--depth", type=int, default=None)


def _config_from_args(args) -> SemanticsConfig:
    try:
        return build_config(
            args.preset, merge=args.merge, comm=args.comm, allow_par=args.allow_par,
            allow_rec=args.allow_rec, allow_star=args.allow_star,
            well_branched=args.well_branched, well_channelled=args.well_channelled,
            max_states=args.max_states, depth=args.depth,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _read_session(args) -> str:
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    entries = parse_session_file(text)
    wanted = getattr(args, "example", None)
    if wanted is not None:
        for entry in entries:
            if entry.name == wanted:
                return print_global(entry.protocol)
        raise UsageError(f"{path} has no example named {wanted!r}")
    if len(entries) > 1:
        names = ", ".join(e.name or "?" for e in entries)
        raise UsageError(f"{path} holds several examples ({names}); pick one with --example")
    return print_global(entries[0].protocol)


def _emit(args, response: dict) -> None:
    if args.json:
        print(json.dumps(response, indent=2, sort_keys=True))


def _call(args, op: str, **fields) -> dict:
    request = {"op": op, **fields}
    response = bridge.handle(request)
    _emit(args, response)
    return response


def _print_error(args, response: dict) -> int:
    error = response["error"]
    if not args.json:
        print(f"error[{error['kind']}]: {error['message']}", file=sys.stderr)
    if error["kind"] in ("ParseError", "BadRequest"):
        return 2
    return 1


# --- subcommands ------------------------------------------------------------


def cmd_check(args) -> int:
    cfg = _config_from_args(args)
    response = _call(args, "check", session=_read_session(args), configA=config_to_json(cfg))
    if not response["ok"]:
        return _print_error(args, response)
    payload = response["payload"]
    if not args.json:
        for warning in payload["warnings"]:
            print(f"warning: {warning}")
        for violation in payload["violations"]:
            print(f"[{violation['kind']}] {violation['message']} at {violation['location']}")
        if not payload["violations"]:
            print("all checks passed")
    return 1 if payload["violations"] else 0


def cmd_project(args) -> int:
    cfg = _config_from_args(args)
    response = _call(args, "project", session=_read_session(args), configA=config_to_json(cfg))
    if not response["ok"]:
        error = response["error"]
        if not args.json and "participant" in error:
            print(error["message"])  # verbatim projection failure
            return 1
        return _print_error(args, response)
    if not args.json:
        for participant, local in sorted(response["payload"]["locals"].items()):
            print(f"{participant}: {local}")
    return 0


def cmd_msc(args) -> int:
    response = _call(args, "msc", session=_read_session(args))
    if not response["ok"]:
        return _print_error(args, response)
    document = response["payload"]["mermaid"]
    if args.mmd:
        Path(args.mmd).write_text(document, encoding="utf-8")
        if not args.json:
            print(f"wrote {args.mmd}")
    elif not args.json:
        print(document, end="")
    return 0


def cmd_lts(args) -> int:
    cfg = _config_from_args(args)
    response = _call(args, "lts", session=_read_session(args), configA=config_to_json(cfg))
    if not response["ok"]:
        return _print_error(args, response)
    payload = response["payload"]
    if args.dot:
        Path(args.dot).write_text(payload["dot"], encoding="utf-8")
    if not args.json:
        states, edges = payload["stateCount"], payload["edgeCount"]
        text = (f"{states} state{'s' if states != 1 else ''}, "
                f"{edges} edge{'s' if edges != 1 else ''}")
        if payload["truncated"]:
            text += " (truncated)"
        print(text)
        if args.dot:
            print(f"wrote {args.dot}")
    return 0


def cmd_locals_fsm(args) -> int:
    cfg = _config_from_args(args)
    response = _call(args, "localsFsm", session=_read_session(args), configA=config_to_json(cfg))
    if not response["ok"]:
        return _print_error(args, response)
    dots = response["payload"]["dots"]
    if args.dot_dir:
        directory = Path(args.dot_dir)
        directory.mkdir(parents=True, exist_ok=True)
        for participant, dot in sorted(dots.items()):
            (directory / f"{participant}.dot").write_text(dot, encoding="utf-8")
        if not args.json:
            print(f"wrote {len(dots)} files to {directory}")
    elif not args.json:
        for participant, dot in sorted(dots.items()):
            print(f"// {participant}")
            print(dot, end="")
    return 0


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    config_json = config_to_json(cfg)
    session = _read_session(args)
    response = bridge.handle({"op": "enabled", "session": session, "configA": config_json})
    if not response["ok"]:
        _emit(args, response)
        return _print_error(args, response)
    payload = response["payload"]

    def show_state():
        for participant, local in sorted(payload["state"]["locals"].items()):
            print(f"  {participant}: {local}")

    if args.trace:
        # replay; in JSON mode only the last response is printed, so the
        # output stays one schema-valid document
        for label in args.trace:
            state = payload["state"]
            response = bridge.handle({"op": "step", "configA": config_json,
                                      "state": state, "label": label})
            if not response["ok"]:
                _emit(args, response)
                error = response["error"]
                if not args.json:
                    print(f"error[{error['kind']}]: {error['message']}", file=sys.stderr)
                return 2 if error["kind"] in ("ParseError", "BadRequest") else 1
            payload = response["payload"]
        _emit(args, response)
        if not args.json:
            print("final state:")
            show_state()
            print(f"terminal: {payload['terminal'] or 'no'}")
        return 0

    # interactive loop: numbered choices until terminal or end of input
    while True:
        if payload["terminal"] is not None:
            print("terminal state:", payload["terminal"])
            show_state()
            return 0
        print("state:")
        show_state()
        for i, move in enumerate(payload["labels"], start=1):
            print(f"  {i}. {move['label']}")
        try:
            line = input("step> ").strip()
        except EOFError:
            print()
            return 0
        if not line:
            continue
        if line in ("q", "quit", "exit"):
            return 0
        moves = payload["labels"]
        chosen = None
        if line.isdigit() and 1 <= int(line) <= len(moves):
            chosen = moves[int(line) - 1]["label"]
        else:
            for move in moves:
                if move["label"] == line:
                    chosen = move["label"]
                    break
        if chosen is None:
            print(f"no such choice: {line}")
            continue
        response = bridge.handle({"op": "step", "configA": config_json,
                                  "state": payload["state"], "label": chosen})
        if not response["ok"]:
            print(f"error[{response['error']['kind']}]: {response['error']['message']}")
            continue
        payload = response["payload"]


def cmd_bisim(args) -> int:
    cfg_a = parse_semantics_spec(args.a)
    cfg_b = parse_semantics_spec(args.b)
    if args.depth is not None:
        cfg_a = cfg_a.with_overrides(bisim_depth_bound=args.depth)
    response = _call(args, "bisim", session=_read_session(args),
                     configA=config_to_json(cfg_a), configB=config_to_json(cfg_b))
    if not response["ok"]:
        return _print_error(args, response)
    payload = response["payload"]
    if not args.json:
        for side in ("a", "b"):
            title = f"semantics {side.upper()}"
            if "error" in payload[side]:
                print(f"{title}: {payload[side]['error']['message']}")
            else:
                print(f"{title}:")
                for participant, local in sorted(payload[side]["locals"].items()):
                    print(f"  {participant}: {local}")
    failed = "error" in payload["a"] or "error" in payload["b"]
    verdict = payload["verdict"]
    if verdict is not None and not args.json:
        print(f"verdict: {verdict['result']} (depth used: {verdict['depthUsed']})")
        if verdict["evidence"]:
            side = verdict["evidenceSide"]
            print(f"evidence (only side {side}): " + " , ".join(verdict["evidence"]))
        if verdict["note"]:
            print(f"note: {verdict['note']}")
    if failed:
        return 1
    return 0 if verdict and verdict["result"] == "bisimilar" else 1


def cmd_examples(args) -> int:
    if args.show:
        try:
            text = example_text(args.show)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        print(text, end="")
        return 0
    if args.json:
        print(json.dumps(bridge.handle({"op": "examples"}), indent=2, sort_keys=True))
        return 0
    for name in list_examples():
        print(name)
    return 0


def cmd_serve(args) -> int:
    from .server import serve
    return serve(args.port, args.ui_dir)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpst",
        description="Parse, check, project, run, and compare multiparty session protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, session_file=True, semantics=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if session_file:
            p.add_argument("file", help="protocol file (.mpst)")
            p.add_argument("--example", help="pick a named example from the file")
        if semantics:
            _add_semantics_flags(p)
        p.add_argument("--json", action="store_true", help="emit the bridge JSON response")
        return p

    add("check", cmd_check, "run well-formedness and gating checks")
    add("project", cmd_project, "project the protocol onto each participant")
    p = add("run", cmd_run, "execute the protocol step by step")
    p.add_argument("--interactive", action="store_true",
                   help="choose steps interactively (default when --trace absent)")
    p.add_argument("--trace", nargs="+", metavar="LABEL",
                   help="replay the given action labels")
    p = add("lts", cmd_lts, "explore the full state space")
    p.add_argument("--dot", metavar="FILE", help="write the DOT rendering here")
    p = add("msc", cmd_msc, "render the message sequence chart", semantics=False)
    p.add_argument("--mmd", metavar="FILE", help="write the Mermaid source here")
    p = add("locals-fsm", cmd_locals_fsm, "render one state machine per participant")
    p.add_argument("--dot-dir", metavar="DIR", help="write one DOT file per participant")
    p = add("bisim", cmd_bisim, "compare two semantics on the same session")
    p.add_argument("--a", required=True, metavar="SPEC",
                   help='first semantics, e.g. "ST4MP" or "ST4MP,comm=unordered"')
    p.add_argument("--b", required=True, metavar="SPEC", help="second semantics")
    p = add("examples", cmd_examples, "list bundled example protocols",
            session_file=False, semantics=False)
    p.add_argument("--show", metavar="NAME", help="print one bundled protocol")
    p = add("serve", cmd_serve, "serve the JSON bridge and web UI over HTTP",
            session_file=False, semantics=False)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", default=None, help="directory with built UI assets")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        if getattr(args, "json", False):
            print(json.dumps({"ok": False, "payload": None, "error": {
                "kind": "ParseError", "message": exc.message,
                "line": exc.line, "column": exc.column, "expected": exc.expected,
            }}, indent=2, sort_keys=True))
        else:
            print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
