"""JSON module files.

Layout::

    {"ring": {"p": 2, "n": 3}, "level": 3, "group": "cyclic:2",
     "shape": [3, 2], "action": {"1": [[1, 0], [1, 1]]}}

``group`` is either a ``"cyclic:m"`` token or ``{"order", "table", "generators"}``.
``action`` maps the element index of each generator to its row-major matrix.
Output uses sorted keys and a fixed layout, so equal modules give equal bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .chainring import RingSpec
from .groups import FiniteGroup, parse_group
from .grouprep import GModule
from .rnmod import Shape

__all__ = ["FormatError", "module_to_dict", "module_from_dict", "dumps", "loads", "read_module", "write_module"]


class FormatError(ValueError):
    """The document is not a well-formed module file."""


def module_to_dict(M: GModule) -> dict:
    return {
        "ring": {"p": M.ring.p, "n": M.ring.n},
        "level": M.level,
        "group": M.group.spec(),
        "shape": list(M.exponents),
        "action": {str(g): A.tolist() for g, A in zip(M.group.generators, M.action)},
    }


def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{what} must be an integer, got {x!r}")
    return x


def _int_matrix(X, rows, what):
    if not isinstance(X, list) or len(X) != rows:
        raise FormatError(f"{what} must be a list of {rows} rows")
    out = []
    for row in X:
        if not isinstance(row, list) or len(row) != rows:
            raise FormatError(f"{what} must be {rows} x {rows}")
        out.append([_int(v, what) for v in row])
    return out


def _group(doc) -> FiniteGroup:
    if isinstance(doc, str):
        try:
            return parse_group(doc)
        except ValueError as e:
            raise FormatError(str(e)) from None
    if not isinstance(doc, dict) or "table" not in doc:
        raise FormatError("group must be 'cyclic:m' or an object with a table")
    return parse_group(doc)


def module_from_dict(doc) -> GModule:
    """Parse a module document.

    Structural problems raise :class:`FormatError`; a well-formed document that
    violates the algebra (non-prime ``p``, non-equivariant action, ...) raises
    the domain error from the constructors.
    """
    if not isinstance(doc, dict):
        raise FormatError("module document must be an object")
    for key in ("ring", "level", "group", "shape", "action"):
        if key not in doc:
            raise FormatError(f"missing field {key!r}")
    ring_doc = doc["ring"]
    if not isinstance(ring_doc, dict) or set(ring_doc) != {"p", "n"}:
        raise FormatError("ring must be an object {p, n}")
    ring = RingSpec(_int(ring_doc["p"], "p"), _int(ring_doc["n"], "n"))
    level = _int(doc["level"], "level")
    group = _group(doc["group"])
    if not isinstance(doc["shape"], list):
        raise FormatError("shape must be a list")
    shape = Shape(ring, tuple(_int(e, "shape entry") for e in doc["shape"]))
    action = doc["action"]
    if not isinstance(action, dict):
        raise FormatError("action must be an object keyed by generator index")
    keys = {str(g) for g in group.generators}
    if set(action) != keys:
        raise FormatError(f"action keys {sorted(action)} do not match generators {sorted(keys)}")
    mats = [_int_matrix(action[str(g)], shape.rank, f"action[{g}]") for g in group.generators]
    return GModule(ring, level, group, shape, mats)


def dumps(M: GModule) -> str:
    return json.dumps(module_to_dict(M), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> GModule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}") from None
    return module_from_dict(doc)


def read_module(path) -> GModule:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from None
    return loads(text)


def write_module(M: GModule, path) -> None:
    Path(path).write_text(dumps(M))
