"""Finite topological spaces with opens encoded as bitmasks over the points."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class TopologyError(ValueError):
    pass


class NotACover(TopologyError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[int, ...]

    @classmethod
    def from_sets(cls, points: Sequence[str], opens: Iterable[Iterable[str]]) -> "FiniteSpace":
        points = tuple(points)
        if len(set(points)) != len(points):
            raise TopologyError("duplicate point names")
        pos = {p: i for i, p in enumerate(points)}
        masks = set()
        for U in opens:
            m = 0
            for p in U:
                if p not in pos:
                    raise TopologyError(f"unknown point {p!r}")
                m |= 1 << pos[p]
            masks.add(m)
        return cls(points, tuple(sorted(masks, key=lambda m: (popcount(m), m))))

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def mask(self, names: Iterable[str]) -> int:
        pos = {p: i for i, p in enumerate(self.points)}
        m = 0
        for p in names:
            if p not in pos:
                raise TopologyError(f"unknown point {p!r}")
            m |= 1 << pos[p]
        return m

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(p for i, p in enumerate(self.points) if mask >> i & 1)

    def show(self, mask: int) -> str:
        return "{" + ",".join(self.names(mask)) + "}"

    def is_open(self, mask: int) -> bool:
        return mask in self._open_set

    @cached_property
    def _open_set(self) -> frozenset[int]:
        return frozenset(self.opens)

    def opens_below(self, U: int) -> list[int]:
        return [V for V in self.opens if V & ~U == 0]

    def subspace_opens(self, U: int) -> list[int]:
        return self.opens_below(U)


def verify_topology(space: FiniteSpace) -> tuple[bool, dict | None]:
    """Check that the opens contain the empty set and the whole space and are
    closed under pairwise union and intersection.  The witness names the
    first failing requirement."""
    opens = set(space.opens)
    if 0 not in opens:
        return False, {"missing": "empty set"}
    if space.full not in opens:
        return False, {"missing": "whole space"}
    ordered = list(space.opens)
    for i, U in enumerate(ordered):
        for V in ordered[i + 1 :]:
            if U | V not in opens:
                return False, {"op": "union", "left": U, "right": V, "result": U | V}
            if U & V not in opens:
                return False, {"op": "intersection", "left": U, "right": V, "result": U & V}
    return True, None


def describe_witness(space: FiniteSpace, witness: dict | None) -> str:
    if witness is None:
        return "ok"
    if "missing" in witness:
        return f"{witness['missing']} is not open"
    sym = "∪" if witness["op"] == "union" else "∩"
    return (
        f"{space.show(witness['left'])}{sym}{space.show(witness['right'])}"
        f" = {space.show(witness['result'])} is not open"
    )


@dataclass(frozen=True)
class Basis:
    space: FiniteSpace
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        for B in self.members:
            if not self.space.is_open(B):
                raise TopologyError(f"basis member {self.space.show(B)} is not open")
            if B == 0:
                raise TopologyError("the empty set is never a basis member")
        for U in self.space.opens:
            covered = 0
            for B in self.members:
                if B & ~U == 0:
                    covered |= B
            if covered != U:
                raise TopologyError(f"{self.space.show(U)} is not a union of basis members")

    @classmethod
    def of(cls, space: FiniteSpace, members: Iterable[int]) -> "Basis":
        ms = sorted(set(members), key=lambda m: (popcount(m), m))
        return cls(space, tuple(ms))

    @classmethod
    def all_opens(cls, space: FiniteSpace) -> "Basis":
        """O(X) as a basis; the empty open is left out."""
        return cls.of(space, [U for U in space.opens if U])

    def below(self, U: int) -> list[int]:
        return [B for B in self.members if B & ~U == 0]

    def __contains__(self, U: int) -> bool:
        return U in self.members


def minimal_basis(space: FiniteSpace) -> Basis:
    """The minimal open neighbourhoods U_x of the points."""
    members = set()
    for i in range(len(space.points)):
        U = space.full
        for V in space.opens:
            if V >> i & 1:
                U &= V
        members.add(U)
    return Basis.of(space, members)


def is_intersection_stable(basis: Basis) -> tuple[bool, tuple[int, int] | None]:
    """Pairwise intersections of members are members; empty ones are allowed."""
    members = set(basis.members)
    for B1, B2 in combinations(basis.members, 2):
        meet = B1 & B2
        if meet and meet not in members:
            return False, (B1, B2)
    return True, None


@dataclass(frozen=True)
class CoverSlice:
    """Basis members lying inside some member of a cover."""

    target: int
    cover: tuple[int, ...]
    members: tuple[int, ...] = field(default=())

    def is_downward_closed(self, basis: Basis) -> bool:
        inside = set(self.members)
        return all(B in inside for U in self.members for B in basis.below(U))


def cover_slice(basis: Basis, B0: int, cover: Sequence[int]) -> CoverSlice:
    union = 0
    for U in cover:
        if U & ~B0:
            raise NotACover(f"{basis.space.show(U)} is not inside {basis.space.show(B0)}")
        union |= U
    if union != B0:
        raise NotACover(f"the family does not cover {basis.space.show(B0)}")
    members = tuple(B for B in basis.members if any(B & ~U == 0 for U in cover))
    return CoverSlice(B0, tuple(cover), members)


def pfin_closure(opens: Sequence[int]) -> list[int]:
    """All intersections of nonempty subfamilies, ordered by size then mask."""
    out = set()
    frontier = set(opens)
    out |= frontier
    while frontier:
        nxt = set()
        for U in frontier:
            for V in opens:
                W = U & V
                if W not in out:
                    nxt.add(W)
        out |= nxt
        frontier = nxt
    return sorted(out, key=lambda m: (popcount(m), m))


def covers_of(candidates: Sequence[int], U: int, include_empty: bool = False) -> Iterator[tuple[int, ...]]:
    """All subfamilies of ``candidates`` inside U whose union is U.

    For U empty the empty family is a cover; it is yielded when
    ``include_empty`` is set.
    """
    inside = [V for V in candidates if V & ~U == 0]
    for r in range(0 if include_empty else 1, len(inside) + 1):
        for family in combinations(inside, r):
            union = 0
            for V in family:
                union |= V
            if union == U:
                yield family


def check_pfin_filtered_slices(space: FiniteSpace, cover: Sequence[int]) -> tuple[bool, int | None]:
    """For every open V below some cover member, the finite intersections
    containing V form a nonempty family in which any two have a common
    lower bound containing V."""
    closure = pfin_closure(cover)
    closure_set = set(closure)
    for V in space.opens:
        if not any(V & ~W == 0 for W in cover):
            continue
        above = [W for W in closure if V & ~W == 0]
        if not above:
            return False, V
        for W1, W2 in combinations(above, 2):
            if not any(V & ~W == 0 and W & ~(W1 & W2) == 0 for W in above):
                return False, V
        if any((W1 & W2) not in closure_set for W1, W2 in combinations(above, 2)):
            return False, V
    return True, None


# -- standard examples ------------------------------------------------------


def sierpinski() -> FiniteSpace:
    return FiniteSpace.from_sets(["p", "q"], [[], ["p"], ["p", "q"]])


def pseudocircle() -> FiniteSpace:
    return FiniteSpace.from_sets(
        ["a", "b", "c", "d"],
        [[], ["a"], ["b"], ["a", "b"], ["a", "b", "c"], ["a", "b", "d"], ["a", "b", "c", "d"]],
    )


def discrete(names: Sequence[str]) -> FiniteSpace:
    opens = []
    for r in range(len(names) + 1):
        opens.extend(combinations(names, r))
    return FiniteSpace.from_sets(names, opens)
