"""Access to the protocol files shipped with the package."""

from __future__ import annotations

from importlib import resources

from .parser import parse_global
from .terms import GlobalType

_PACKAGE = "mpstlab.protocols"


def list_examples() -> list:
    """Names of all bundled protocols, sorted."""
    names = []
    for entry in resources.files(_PACKAGE).iterdir():
        if entry.name.endswith(".mpst"):
            names.append(entry.name[: -len(".mpst")])
    return sorted(names)


def example_text(name: str) -> str:
    path = resources.files(_PACKAGE) / f"{name}.mpst"
    if not path.is_file():
        raise KeyError(f"no bundled example named {name!r}")
    return path.read_text(encoding="utf-8")


def load_example(name: str) -> GlobalType:
    return parse_global(example_text(name))
