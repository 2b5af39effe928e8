#!/usr/bin/env python3
"""Record real bridge responses for the UI tests.

Each fixture entry maps a request (serialised with sorted keys) to the
byte-exact response the Python bridge produced, so the component tests can
assert that everything the UI displays equals what the bridge said.
"""

import json
import sys
from pathlib import Path

from mpstlab import bridge
from mpstlab.config import config_to_json, preset
from mpstlab.examples import example_text

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "bridge_fixtures.json"

PLAIN_ASYNC = config_to_json(preset("GentleIntroMPAsyncST"))
FULL_SYNC = config_to_json(preset("VeryGentleIntroMPST"))
FULL_ASYNC = {**PLAIN_ASYNC, "merge": "full"}


def main() -> int:
    requests = [
        {"op": "examples"},
        {"op": "presets"},
    ]

    branching = example_text("branching_tasks")
    work_loop = example_text("work_loop")

    for session in (branching, work_loop):
        requests.append({"op": "parse", "session": session})
        requests.append({"op": "msc", "session": session})
        for config in (FULL_SYNC, PLAIN_ASYNC, FULL_ASYNC):
            requests.extend([
                {"op": "check", "session": session, "configA": config},
                {"op": "project", "session": session, "configA": config},
                {"op": "localsFsm", "session": session, "configA": config},
                {"op": "lts", "session": session, "configA": config},
                {"op": "enabled", "session": session, "configA": config},
                {"op": "bisim", "session": session, "configA": FULL_SYNC, "configB": config},
            ])
    # bisim combinations the flow test toggles through
    for config_b in (PLAIN_ASYNC, FULL_ASYNC):
        requests.append({"op": "bisim", "session": branching,
                         "configA": FULL_SYNC, "configB": config_b})

    # every reachable step of the delegation loop under the async preset,
    # breadth-first, so any click sequence in the step pane is covered
    fixtures = {}

    def record(request):
        # compact separators so JSON.stringify-with-sorted-keys finds the key
        key = json.dumps(request, sort_keys=True, separators=(",", ":"))
        if key not in fixtures:
            fixtures[key] = bridge.handle(request)
        return fixtures[key]

    for request in requests:
        record(request)

    seen_states = set()
    frontier = []
    enabled0 = record({"op": "enabled", "session": work_loop, "configA": PLAIN_ASYNC})
    frontier.append(enabled0["payload"])
    # a refused step: receiving before anything was sent
    record({"op": "step", "configA": PLAIN_ASYNC,
            "state": enabled0["payload"]["state"], "label": "controllerworker?Quit"})
    budget = 200
    while frontier and budget > 0:
        payload = frontier.pop(0)
        state_key = json.dumps(payload["state"], sort_keys=True)
        if state_key in seen_states:
            continue
        seen_states.add(state_key)
        for move in payload["labels"]:
            budget -= 1
            response = record({"op": "step", "configA": PLAIN_ASYNC,
                               "state": payload["state"], "label": move["label"]})
            if response["ok"]:
                frontier.append(response["payload"])

    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE_PATH.write_text(json.dumps(fixtures, sort_keys=True, indent=1), encoding="utf-8")
    print(f"recorded {len(fixtures)} fixtures to {FIXTURE_PATH}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
