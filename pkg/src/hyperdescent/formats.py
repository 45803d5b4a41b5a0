"""JSON file formats for spaces, hypercovers, presheaves and poset maps.

Opens are always written as lists of point names.

space:      {"points": [...], "opens": [[...], ...], "basis": [[...], ...]?}
hypercover: {"space": <space>, "hypercover": {"target", "spine", "assignment"}}
presheaf:   {"values": [{"open", "elements"}], "restrictions": [{"from", "to", "map"}]}
poset map:  {"source": <poset>, "target": <poset>, "map": {x: y}}
poset:      {"elements": [...], "less": [[x, y], ...]}  (closed transitively)
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .descent import PresheafError, SetPresheaf
from .homotopy import FinitePoset, PosetError, PosetMap
from .hypercover import Hypercover
from .simplicial import FiniteTypeSimplicialSet, SimplicialError
from .topology import Basis, FiniteSpace, TopologyError


class InputError(ValueError):
    """Unreadable or malformed input (as opposed to a mathematical failure)."""


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def write_json(path: str | Path, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require(data: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{where}: missing key {key!r}")
    value = data[key]
    if not isinstance(value, kind):
        raise InputError(f"{where}: {key!r} must be a {kind.__name__}")
    return value


def _name_lists(value: Any, where: str) -> list[list[str]]:
    if not isinstance(value, list) or not all(
        isinstance(U, list) and all(isinstance(p, str) for p in U) for U in value
    ):
        raise InputError(f"{where}: expected a list of lists of point names")
    return value


def space_to_dict(space: FiniteSpace, basis: Basis | None = None) -> dict:
    out = {
        "points": list(space.points),
        "opens": [list(space.names(U)) for U in space.opens],
    }
    if basis is not None:
        out["basis"] = [list(space.names(B)) for B in basis.members]
    return out


def space_from_dict(data: Any, where: str = "space") -> tuple[FiniteSpace, list[list[str]] | None]:
    """The space and, if present, the raw basis entry (validated separately)."""
    points = _require(data, "points", list, where)
    if not all(isinstance(p, str) for p in points):
        raise InputError(f"{where}: point names must be strings")
    opens = _name_lists(_require(data, "opens", list, where), f"{where} opens")
    try:
        space = FiniteSpace.from_sets(points, opens)
    except TopologyError as exc:
        raise InputError(f"{where}: {exc}") from None
    basis = data.get("basis")
    if basis is not None and not isinstance(basis, str):
        basis = _name_lists(basis, f"{where} basis")
    return space, basis


def load_space(path: str | Path) -> tuple[FiniteSpace, Any]:
    return space_from_dict(read_json(path), str(path))


def resolve_basis(space: FiniteSpace, choice: Any) -> Basis:
    """``choice`` is "minimal", "all", or a list of opens as point-name lists.

    Raises TopologyError when the listed family is not a basis.
    """
    if choice is None or choice == "minimal":
        from .topology import minimal_basis

        return minimal_basis(space)
    if choice == "all":
        return Basis.all_opens(space)
    if isinstance(choice, str):
        raise InputError(f"unknown basis {choice!r}; use minimal, all, or list the members")
    try:
        members = [space.mask(U) for U in choice]
    except TopologyError as exc:
        raise InputError(str(exc)) from None
    return Basis.of(space, members)


def hypercover_to_dict(H: Hypercover) -> dict:
    return {"space": space_to_dict(H.space), "hypercover": H.to_dict()}


def load_hypercover(path: str | Path) -> Hypercover:
    data = read_json(path)
    space, _ = space_from_dict(_require(data, "space", dict, str(path)), f"{path} space")
    body = _require(data, "hypercover", dict, str(path))
    try:
        return Hypercover.from_dict(body, space)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"{path}: malformed hypercover ({exc})") from None
    except (SimplicialError, TopologyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_presheaf(path: str | Path, space: FiniteSpace) -> SetPresheaf:
    data = read_json(path)
    _require(data, "values", list, str(path))
    _require(data, "restrictions", list, str(path))
    try:
        return SetPresheaf.from_dict(data, space)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"{path}: malformed presheaf ({exc})") from None
    except (PresheafError, TopologyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def poset_from_dict(data: Any, where: str) -> FinitePoset:
    elements = _require(data, "elements", list, where)
    less = _require(data, "less", list, where)
    if not all(isinstance(pair, list) and len(pair) == 2 for pair in less):
        raise InputError(f"{where}: 'less' must be a list of pairs")
    try:
        return FinitePoset.from_covers([str(x) for x in elements], [(str(x), str(y)) for x, y in less])
    except (PosetError, KeyError) as exc:
        raise InputError(f"{where}: {exc}") from None


def load_poset_map(path: str | Path) -> PosetMap:
    data = read_json(path)
    source = poset_from_dict(_require(data, "source", dict, str(path)), f"{path} source")
    target = poset_from_dict(_require(data, "target", dict, str(path)), f"{path} target")
    mapping = _require(data, "map", dict, str(path))
    try:
        return PosetMap(source, target, {str(k): str(v) for k, v in mapping.items()})
    except PosetError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_posets(path: str | Path) -> tuple[FinitePoset, FinitePoset]:
    """A pair {"I": <poset>, "J": <poset>} on the same elements."""
    data = read_json(path)
    I = poset_from_dict(_require(data, "I", dict, str(path)), f"{path} I")
    J = poset_from_dict(_require(data, "J", dict, str(path)), f"{path} J")
    if set(I.elements) != set(J.elements):
        raise InputError(f"{path}: I and J must have the same elements")
    return I, J


def load_simplicial_set(path: str | Path) -> FiniteTypeSimplicialSet:
    data = read_json(path)
    try:
        return FiniteTypeSimplicialSet.from_dict(data)
    except (KeyError, TypeError, IndexError, SimplicialError) as exc:
        raise InputError(f"{path}: malformed simplicial set ({exc})") from None
