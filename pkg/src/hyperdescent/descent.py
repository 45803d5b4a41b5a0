"""Set-valued presheaves on finite posets of opens, their limits, and descent checks.

Limits are computed as matching families by a small backtracking solver over
functional constraints ``x_dst = table[x_src]``.

For a hypercover, the limit of F o U over the category of simplices is
computed from vertices and nondegenerate edges only.  A component at a
simplex x is the restriction of the component at any of its vertices, so
vertex components determine everything.  Compatibility at a higher simplex
says that all its vertex components agree after restriction to U(x), and
since U(x) lies inside the open of each of its edges, this already follows
from agreement along those edges.  Degenerate simplices carry the open of
their core and add nothing.  The tests compare this against a brute-force
limit over all simplices up to dimension 3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .hypercover import (
    Hypercover,
    RefinedHypercover,
    cech_from_cover,
    check_hypercover,
    refine_to_basis,
    restrict_below,
    trivial_hypercover,
)
from .simplicial import TruncationError
from .topology import Basis, FiniteSpace, TopologyError, covers_of, pfin_closure, popcount


class PresheafError(ValueError):
    pass


class MissingValue(PresheafError):
    pass


def _size_order(opens: Iterable[int]) -> list[int]:
    return sorted(set(opens), key=lambda m: (popcount(m), m))


def _maximal_below(index: Sequence[int], U: int) -> list[int]:
    below = [V for V in index if V != U and V & ~U == 0]
    return [V for V in below if not any(W != V and V & ~W == 0 for W in below)]


class SetPresheaf:
    """A presheaf of finite sets on a family of opens ordered by inclusion.

    ``values[U]`` lists element labels; ``restrictions[(U, V)]`` maps element
    positions of F(U) to positions of F(V).  Tables are required for every
    covering relation of the index; other pairs are composed along chains,
    unless given explicitly.
    """

    def __init__(
        self,
        space: FiniteSpace,
        values: Mapping[int, Sequence[str]],
        restrictions: Mapping[tuple[int, int], Sequence[int]],
    ) -> None:
        self.space = space
        self.index: tuple[int, ...] = tuple(_size_order(values))
        for U in self.index:
            if not space.is_open(U):
                raise PresheafError(f"{space.show(U)} is not open")
        self.values = {U: tuple(values[U]) for U in self.index}
        self.given: dict[tuple[int, int], tuple[int, ...]] = {}
        for (U, V), table in restrictions.items():
            if U not in self.values or V not in self.values:
                raise PresheafError(
                    f"restriction {space.show(U)} -> {space.show(V)} leaves the index"
                )
            if V & ~U:
                raise PresheafError(f"{space.show(V)} is not inside {space.show(U)}")
            table = tuple(table)
            if len(table) != len(self.values[U]) or any(
                not 0 <= y < len(self.values[V]) for y in table
            ):
                raise PresheafError(
                    f"restriction {space.show(U)} -> {space.show(V)} has the wrong shape"
                )
            self.given[(U, V)] = table
        self._res: dict[tuple[int, int], tuple[int, ...]] = {}
        for U in self.index:
            self._res[(U, U)] = self.given.get((U, U), tuple(range(len(self.values[U]))))
            covers = _maximal_below(self.index, U)
            for V in covers:
                if (U, V) not in self.given:
                    raise PresheafError(
                        f"missing restriction {space.show(U)} -> {space.show(V)}"
                    )
            for V in reversed(self.index):
                if V == U or V & ~U:
                    continue
                if (U, V) in self.given:
                    self._res[(U, V)] = self.given[(U, V)]
                    continue
                W = next(W for W in covers if V & ~W == 0)
                first, second = self.given[(U, W)], self._res[(W, V)]
                self._res[(U, V)] = tuple(second[x] for x in first)

    def __repr__(self) -> str:
        sizes = ", ".join(f"{self.space.show(U)}:{len(self.values[U])}" for U in self.index)
        return f"SetPresheaf({sizes})"

    def size(self, U: int) -> int:
        try:
            return len(self.values[U])
        except KeyError:
            raise MissingValue(f"no value at {self.space.show(U)}") from None

    def res(self, U: int, V: int) -> tuple[int, ...]:
        try:
            return self._res[(U, V)]
        except KeyError:
            if U not in self.values or V not in self.values:
                missing = U if U not in self.values else V
                raise MissingValue(f"no value at {self.space.show(missing)}") from None
            raise PresheafError(
                f"{self.space.show(V)} is not inside {self.space.show(U)}"
            ) from None

    def check_functorial(self) -> tuple[int, int, int] | None:
        """First triple V <= W <= U with res(U,V) != res(W,V) res(U,W)."""
        for U in self.index:
            if self._res[(U, U)] != tuple(range(len(self.values[U]))):
                return U, U, U
        for U in self.index:
            for W in self.index:
                if W & ~U or W == U:
                    continue
                for V in self.index:
                    if V & ~W or V == W:
                        continue
                    composed = tuple(self._res[(W, V)][x] for x in self._res[(U, W)])
                    if composed != self._res[(U, V)]:
                        return V, W, U
        return None

    def restrict_to(self, opens: Iterable[int]) -> "SetPresheaf":
        keep = _size_order(opens)
        return SetPresheaf(
            self.space,
            {U: self.values[U] for U in keep},
            {(U, V): self._res[(U, V)] for U in keep for V in keep if V != U and V & ~U == 0},
        )

    def with_restriction(self, U: int, V: int, table: Sequence[int]) -> "SetPresheaf":
        """A copy with one covering table replaced (other pairs are recomposed)."""
        given = {k: v for k, v in self.given.items() if k[1] in _maximal_below(self.index, k[0])}
        given[(U, V)] = tuple(table)
        return SetPresheaf(self.space, self.values, given)

    def key(self) -> tuple:
        return tuple(
            (U, len(self.values[U]), tuple(self._res[(U, V)] for V in _maximal_below(self.index, U)))
            for U in self.index
        )

    def to_dict(self) -> dict:
        sp = self.space
        return {
            "values": [
                {"open": list(sp.names(U)), "elements": list(self.values[U])} for U in self.index
            ],
            "restrictions": [
                {
                    "from": list(sp.names(U)),
                    "to": list(sp.names(V)),
                    "map": {self.values[U][x]: self.values[V][y] for x, y in enumerate(self._res[(U, V)])},
                }
                for U in self.index
                for V in _maximal_below(self.index, U)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, space: FiniteSpace) -> "SetPresheaf":
        values = {}
        for entry in data["values"]:
            U = space.mask(entry["open"])
            elems = [str(x) for x in entry["elements"]]
            if len(set(elems)) != len(elems):
                raise PresheafError(f"duplicate elements at {space.show(U)}")
            values[U] = elems
        tables = {}
        for entry in data["restrictions"]:
            U, V = space.mask(entry["from"]), space.mask(entry["to"])
            if U not in values or V not in values:
                raise PresheafError(f"restriction {space.show(U)} -> {space.show(V)} leaves the index")
            pos = {x: i for i, x in enumerate(values[V])}
            mapping = {str(k): str(v) for k, v in entry["map"].items()}
            try:
                tables[(U, V)] = [pos[mapping[x]] for x in values[U]]
            except KeyError as exc:
                raise PresheafError(
                    f"restriction {space.show(U)} -> {space.show(V)} is not a total map: {exc}"
                ) from None
        return cls(space, values, tables)


def constant_presheaf(space: FiniteSpace, opens: Iterable[int], labels: Sequence[str]) -> SetPresheaf:
    opens = _size_order(opens)
    ident = tuple(range(len(labels)))
    return SetPresheaf(
        space,
        {U: labels for U in opens},
        {(U, V): ident for U in opens for V in _maximal_below(opens, U)},
    )


def maps_presheaf(space: FiniteSpace, opens: Iterable[int], k: int = 2) -> SetPresheaf:
    """F(U) = functions U -> {0..k-1}, labelled by their values on the points of U."""
    opens = _size_order(opens)
    values, elems = {}, {}
    for U in opens:
        pts = [i for i in range(len(space.points)) if U >> i & 1]
        fs = list(product(range(k), repeat=len(pts)))
        elems[U] = (pts, fs)
        values[U] = ["".join(map(str, f)) if f else "*" for f in fs]
    tables = {}
    for U in opens:
        ptsU, fsU = elems[U]
        for V in _maximal_below(opens, U):
            ptsV, fsV = elems[V]
            pos = {f: i for i, f in enumerate(fsV)}
            where = [ptsU.index(p) for p in ptsV]
            tables[(U, V)] = [pos[tuple(f[j] for j in where)] for f in fsU]
    return SetPresheaf(space, values, tables)


# -- limits -------------------------------------------------------------------

MatchingFamily = tuple[int, ...]


@dataclass(frozen=True)
class Limit:
    """Matching families: ``families[i][j]`` is the component at ``keys[j]``."""

    keys: tuple[Hashable, ...]
    opens: tuple[int, ...]
    families: tuple[MatchingFamily, ...]

    def __len__(self) -> int:
        return len(self.families)


def _solve(
    sizes: Sequence[int], constraints: Sequence[tuple[int, int, Sequence[int]]]
) -> list[MatchingFamily]:
    """All assignments x with x[dst] = table[x[src]] for each constraint."""
    n = len(sizes)
    if any(s == 0 for s in sizes):
        return []
    links: list[list[int]] = [[] for _ in range(n)]
    for c, (s, d, _) in enumerate(constraints):
        links[s].append(c)
        links[d].append(c)
    # place objects with the most already-placed neighbours first
    order: list[int] = []
    placed = [False] * n
    weight = [0] * n
    for _ in range(n):
        nxt = max((i for i in range(n) if not placed[i]), key=lambda i: (weight[i], -i))
        placed[nxt] = True
        order.append(nxt)
        for c in links[nxt]:
            s, d, _ = constraints[c]
            weight[d if s == nxt else s] += 1
    rank = {obj: i for i, obj in enumerate(order)}
    # constraints checked when the later-placed end is assigned
    checks: list[list[tuple[int, int, Sequence[int]]]] = [[] for _ in range(n)]
    for s, d, table in constraints:
        checks[order[max(rank[s], rank[d])]].append((s, d, table))

    x = [0] * n
    out: list[MatchingFamily] = []

    def assign(pos: int) -> None:
        if pos == n:
            out.append(tuple(x))
            return
        obj = order[pos]
        for v in range(sizes[obj]):
            x[obj] = v
            if all(table[x[s]] == x[d] for s, d, table in checks[obj]):
                assign(pos + 1)

    assign(0)
    return sorted(out)


def limit_over_poset(F: SetPresheaf, P: Iterable[int]) -> Limit:
    """Limit of F over a family of opens (restrictions along every inclusion)."""
    opens = tuple(_size_order(P))
    sizes = [F.size(U) for U in opens]
    pos = {U: i for i, U in enumerate(opens)}
    constraints = [
        (pos[U], pos[V], F.res(U, V))
        for U in opens
        for V in opens
        if V != U and V & ~U == 0
    ]
    return Limit(opens, opens, tuple(_solve(sizes, constraints)))


def limit_over_hypercover(F: SetPresheaf, H: Hypercover) -> Limit:
    """Limit of F o U over the category of simplices, from vertices and edges."""
    if H.max_dim < 1:
        raise TruncationError("the edge reduction needs the spine through dimension 1")
    K = H.spine
    keys: list[tuple[int, int]] = []
    opens: list[int] = []
    for d in (0, 1):
        for ref in K.nondegenerate(d):
            keys.append((d, ref.core))
            opens.append(H.open_of(ref))
    pos = {k: i for i, k in enumerate(keys)}
    sizes = [F.size(U) for U in opens]
    constraints = []
    for e in K.nondegenerate(1):
        Ue = H.open_of(e)
        for v in K.face_table(1, e.core):
            constraints.append((pos[(0, v.core)], pos[(1, e.core)], F.res(H.open_of(v), Ue)))
    return Limit(tuple(keys), tuple(opens), tuple(_solve(sizes, constraints)))


@dataclass(frozen=True)
class Comparison:
    ok: bool
    witness: dict | None = None


def compare_to_limit(F: SetPresheaf, U: int, limit: Limit) -> Comparison:
    """Whether x -> (x restricted to each open of the limit) is a bijection F(U) -> limit."""
    tables = [F.res(U, V) for V in limit.opens]
    seen: dict[MatchingFamily, int] = {}
    for x in range(F.size(U)):
        image = tuple(t[x] for t in tables)
        if image in seen:
            return Comparison(False, {
                "kind": "not-injective",
                "elements": [F.values[U][seen[image]], F.values[U][x]],
            })
        seen[image] = x
    for fam in limit.families:
        if fam not in seen:
            return Comparison(False, {
                "kind": "not-surjective",
                "family": [
                    [F.space.show(V), F.values[V][c]] for V, c in zip(limit.opens, fam)
                ],
            })
    if len(seen) != len(limit.families):
        # an image that is not a matching family means F is not functorial
        return Comparison(False, {"kind": "not-a-family"})
    return Comparison(True)


# -- sheaf conditions --------------------------------------------------------


def sieve_of(candidates: Iterable[int], cover: Sequence[int]) -> list[int]:
    return [W for W in candidates if any(W & ~V == 0 for V in cover)]


def _check_covers(F: SetPresheaf, cover_pool: Sequence[int], include_empty: bool) -> tuple[bool, dict | None]:
    for U in F.index:
        for cover in covers_of(cover_pool, U, include_empty=include_empty and U == 0):
            lim = limit_over_poset(F, sieve_of(F.index, cover))
            cmp = compare_to_limit(F, U, lim)
            if not cmp.ok:
                sp = F.space
                return False, {
                    "open": sp.show(U),
                    "cover": [sp.show(V) for V in cover],
                    **cmp.witness,
                }
    return True, None


def check_sheaf_on_basis(F: SetPresheaf, basis: Basis) -> tuple[bool, dict | None]:
    """For every member and every cover of it by members, F(B) is the limit
    over the members lying in some cover element."""
    if set(F.index) != set(basis.members):
        raise PresheafError("presheaf is not indexed by the basis")
    return _check_covers(F, basis.members, include_empty=False)


def check_sheaf(F: SetPresheaf) -> tuple[bool, dict | None]:
    """Sheaf condition on all opens; the empty family covers the empty set."""
    if set(F.index) != set(F.space.opens):
        raise PresheafError("presheaf is not defined on every open")
    return _check_covers(F, F.space.opens, include_empty=True)


def compare_cover_limits(F: SetPresheaf, cover: Sequence[int]) -> Comparison:
    """Restriction from the limit over all opens inside some cover member
    to the limit over the finite intersections of the cover members."""
    big = limit_over_poset(F, sieve_of(F.index, cover))
    small_opens = pfin_closure(cover)
    small = limit_over_poset(F, small_opens)
    where = [big.opens.index(V) for V in small.opens]
    seen: dict[MatchingFamily, MatchingFamily] = {}
    for fam in big.families:
        image = tuple(fam[j] for j in where)
        if image in seen:
            return Comparison(False, {"kind": "not-injective", "families": [seen[image], fam]})
        seen[image] = fam
    for fam in small.families:
        if fam not in seen:
            return Comparison(False, {"kind": "not-surjective", "family": fam})
    return Comparison(True)


# -- hypercover suites ---------------------------------------------------------


@dataclass(frozen=True)
class SuiteItem:
    name: str
    hypercover: Hypercover


@dataclass
class HypercoverSuite:
    """Hypercovers per target open.  ``check_empty`` adds the empty hypercover
    of the empty open, whose limit is a point."""

    items: dict[int, list[SuiteItem]] = field(default_factory=dict)
    check_empty: bool = False

    def add(self, target: int, item: SuiteItem) -> None:
        self.items.setdefault(target, []).append(item)

    def for_target(self, U: int) -> list[SuiteItem]:
        return self.items.get(U, [])

    def __len__(self) -> int:
        return sum(len(v) for v in self.items.values())


def _shape(H: Hypercover) -> tuple:
    K = H.spine
    verts = tuple(H.open_of(v) for v in K.nondegenerate(0))
    edges = tuple(sorted(
        (tuple(f.core for f in K.face_table(1, e.core)), H.open_of(e)) for e in K.nondegenerate(1)
    ))
    return verts, edges


def _irredundant(cover: Sequence[int]) -> bool:
    total = 0
    for V in cover:
        total |= V
    for i in range(len(cover)):
        rest = 0
        for j, V in enumerate(cover):
            if j != i:
                rest |= V
        if rest == total:
            return False
    return True


def hypercover_suite(
    basis: Basis,
    *,
    allow_empty: bool = False,
    N: int = 1,
    extra: Iterable[SuiteItem] = (),
) -> HypercoverSuite:
    """Generated hypercovers of each basis member, with opens in the basis.

    Per member B: Cech hypercovers of covers of B by opens, kept when every
    assigned open is a member (or empty, with ``allow_empty``); basis
    refinements of the trivial hypercover and of Cech hypercovers of
    irredundant covers; and the same refinements for larger opens restricted
    below B.  Duplicate vertex/edge shapes are dropped.
    """
    space = basis.space
    allowed = set(basis.members) | ({0} if allow_empty else set())
    suite = HypercoverSuite(check_empty=allow_empty)
    seen: dict[int, set] = {}

    def add(target: int, name: str, H: Hypercover) -> None:
        if not H.opens_used() <= allowed:
            return
        shape = _shape(H)
        if shape in seen.setdefault(target, set()):
            return
        seen[target].add(shape)
        suite.add(target, SuiteItem(name, H))

    def show(cover):
        return " ".join(space.show(V) for V in cover)

    nonempty = [U for U in space.opens if U]
    base_covers: dict[int, list[tuple[str, Hypercover]]] = {}
    for U in nonempty:
        bases = [("trivial", trivial_hypercover(space, U, N))]
        for cover in covers_of(nonempty, U):
            if len(cover) > 1 and _irredundant(cover):
                bases.append((f"cech {show(cover)}", cech_from_cover(space, cover, N, target=U)))
        base_covers[U] = bases

    for B in basis.members:
        add(B, "trivial", trivial_hypercover(space, B, N))
        for cover in covers_of(nonempty, B):
            add(B, f"cech {show(cover)}", cech_from_cover(space, cover, N, target=B))
        for name, H in base_covers[B]:
            add(B, f"refined {name}", refine_to_basis(H, basis, N))
        for U in nonempty:
            if U == B or B & ~U:
                continue
            for name, H in base_covers[U]:
                R = refine_to_basis(H, basis, N)
                add(B, f"refined {name} below {space.show(B)}", restrict_below(R, B))
    for item in extra:
        suite.add(item.hypercover.target, item)
    return suite


def check_hypersheaf(F: SetPresheaf, suite: HypercoverSuite) -> tuple[bool, dict | None]:
    """F(B) -> limit over each listed hypercover of B is a bijection."""
    sp = F.space
    if suite.check_empty and 0 in F.values and F.size(0) != 1:
        return False, {
            "open": sp.show(0),
            "hypercover": "empty",
            "kind": "not-injective" if F.size(0) > 1 else "not-surjective",
        }
    for U in F.index:
        for item in suite.for_target(U):
            cmp = compare_to_limit(F, U, limit_over_hypercover(F, item.hypercover))
            if not cmp.ok:
                return False, {"open": sp.show(U), "hypercover": item.name, **cmp.witness}
    return True, None


def _local_check(condition: str, suite: HypercoverSuite | None, cover_pool: Sequence[int], include_empty: bool):
    """Check the chosen condition at a single open of a (partial) presheaf."""

    def check(F: SetPresheaf, U: int) -> bool:
        if condition == "hypersheaf":
            if U == 0 and suite.check_empty:
                return F.size(0) == 1
            return all(
                compare_to_limit(F, U, limit_over_hypercover(F, item.hypercover)).ok
                for item in suite.for_target(U)
            )
        for cover in covers_of(cover_pool, U, include_empty=include_empty and U == 0):
            if not compare_to_limit(F, U, limit_over_poset(F, sieve_of(F.index, cover))).ok:
                return False
        return True

    return check


# -- right Kan extension --------------------------------------------------------


@dataclass
class KanExtension:
    """Right Kan extension along the inclusion of the basis into all opens.

    ``families[U]`` lists the elements of the extension at U as matching
    families over ``members[U]``, the basis opens inside U.
    """

    presheaf: SetPresheaf
    members: dict[int, tuple[int, ...]]
    families: dict[int, tuple[MatchingFamily, ...]]


def right_kan_extend(F: SetPresheaf, space: FiniteSpace | None = None) -> KanExtension:
    space = F.space if space is None else space
    members, families, values = {}, {}, {}
    for U in space.opens:
        lim = limit_over_poset(F, [B for B in F.index if B & ~U == 0])
        members[U] = lim.opens
        families[U] = lim.families
        values[U] = [
            "(" + ",".join(F.values[B][c] for B, c in zip(lim.opens, fam)) + ")"
            for fam in lim.families
        ]
    tables = {}
    for U in space.opens:
        for V in _maximal_below(space.opens, U):
            where = [members[U].index(B) for B in members[V]]
            pos = {fam: i for i, fam in enumerate(families[V])}
            tables[(U, V)] = [pos[tuple(fam[j] for j in where)] for fam in families[U]]
    return KanExtension(SetPresheaf(space, values, tables), members, families)


def unit_comparison(F: SetPresheaf, ext: KanExtension, opens: Iterable[int]) -> tuple[bool, dict | None]:
    """F(U) -> Ext(U), x -> (x restricted to each member below U), is bijective on ``opens``."""
    for U in opens:
        tables = [F.res(U, B) for B in ext.members[U]]
        target = {fam: i for i, fam in enumerate(ext.families[U])}
        hit = set()
        for x in range(F.size(U)):
            fam = tuple(t[x] for t in tables)
            if fam not in target or fam in hit:
                return False, {
                    "open": F.space.show(U),
                    "kind": "not-injective" if fam in hit else "not-a-family",
                    "element": F.values[U][x],
                }
            hit.add(fam)
        if len(hit) != len(target):
            missing = next(fam for fam in ext.families[U] if fam not in hit)
            return False, {
                "open": F.space.show(U),
                "kind": "not-surjective",
                "family": [
                    [F.space.show(B), F.values[B][c]] for B, c in zip(ext.members[U], missing)
                ],
            }
    return True, None


# -- enumeration -------------------------------------------------------------------


def enumerate_presheaves(
    space: FiniteSpace,
    index: Iterable[int],
    cap: int,
    accept: Callable[[SetPresheaf, int], bool] | None = None,
    min_size: int = 0,
) -> Iterator[SetPresheaf]:
    """All presheaves on ``index`` with value sets {0..k-1}, k <= cap.

    ``accept(partial, U)`` is consulted once U and everything below it is
    assigned; rejected branches are pruned.
    """
    opens = _size_order(index)
    covers = {U: _maximal_below(opens, U) for U in opens}
    sizes: dict[int, int] = {}
    given: dict[tuple[int, int], tuple[int, ...]] = {}
    res: dict[tuple[int, int], tuple[int, ...]] = {}

    def partial(upto: int) -> SetPresheaf:
        keep = opens[: upto + 1]
        return SetPresheaf(
            space,
            {U: [str(i) for i in range(sizes[U])] for U in keep},
            {k: v for k, v in given.items() if k[0] in sizes},
        )

    def assign(pos: int) -> Iterator[SetPresheaf]:
        if pos == len(opens):
            yield partial(pos - 1)
            return
        U = opens[pos]
        below = [V for V in opens[:pos] if V & ~U == 0]
        for s in range(min_size, cap + 1):
            sizes[U] = s
            choices = [list(product(range(sizes[V]), repeat=s)) for V in covers[U]]
            for tables in product(*choices):
                composite: dict[int, tuple[int, ...]] = {}
                ok = True
                for V, t in zip(covers[U], tables):
                    for W in below:
                        if W & ~V:
                            continue
                        via = t if W == V else tuple(res[(V, W)][x] for x in t)
                        if composite.setdefault(W, via) != via:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                for V, t in zip(covers[U], tables):
                    given[(U, V)] = t
                for W, t in composite.items():
                    res[(U, W)] = t
                if accept is None or accept(partial(pos), U):
                    yield from assign(pos + 1)
                for V in covers[U]:
                    del given[(U, V)]
                for W in composite:
                    del res[(U, W)]
            del sizes[U]

    yield from assign(0)


def random_presheaf(
    space: FiniteSpace, index: Iterable[int], cap: int, rng: random.Random, tries: int = 200
) -> SetPresheaf | None:
    """One presheaf with uniformly chosen sizes and covering tables, or None
    if no functorial choice turned up within ``tries`` attempts per open."""
    opens = _size_order(index)
    covers = {U: _maximal_below(opens, U) for U in opens}
    sizes: dict[int, int] = {}
    given: dict[tuple[int, int], tuple[int, ...]] = {}
    res: dict[tuple[int, int], tuple[int, ...]] = {}
    for pos, U in enumerate(opens):
        below = [V for V in opens[:pos] if V & ~U == 0]
        for _ in range(tries):
            s = rng.randint(0, cap)
            tables = [tuple(rng.randrange(sizes[V]) for _ in range(s)) if sizes[V] else None for V in covers[U]]
            if any(t is None and s > 0 for t in tables):
                continue
            tables = [t if t is not None else () for t in tables]
            composite: dict[int, tuple[int, ...]] = {}
            ok = True
            for V, t in zip(covers[U], tables):
                for W in below:
                    if W & ~V:
                        continue
                    via = t if W == V else tuple(res[(V, W)][x] for x in t)
                    if composite.setdefault(W, via) != via:
                        ok = False
            if ok:
                break
        else:
            return None
        sizes[U] = s
        for V, t in zip(covers[U], tables):
            given[(U, V)] = t
        for W, t in composite.items():
            res[(U, W)] = t
    return SetPresheaf(space, {U: [str(i) for i in range(sizes[U])] for U in opens}, given)


# -- the round trip -------------------------------------------------------------------


@dataclass
class RoundtripReport:
    space_points: tuple[str, ...]
    basis: tuple[str, ...]
    condition: str
    cap: int
    samples: int | None
    seed: int
    suite_sizes: dict = field(default_factory=dict)
    basis_considered: int = 0
    basis_accepted: int = 0
    basis_rejected: int = 0
    space_accepted: int = 0
    supplied_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "points": list(self.space_points),
            "basis": list(self.basis),
            "condition": self.condition,
            "cap": self.cap,
            "samples": self.samples,
            "seed": self.seed,
            "suite_sizes": self.suite_sizes,
            "basis_considered": self.basis_considered,
            "basis_accepted": self.basis_accepted,
            "basis_rejected": self.basis_rejected,
            "space_accepted": self.space_accepted,
            "supplied_checked": self.supplied_checked,
            "failures": self.failures,
            "ok": self.ok,
        }


def roundtrip_theorem_check(
    space: FiniteSpace,
    basis: Basis,
    cap: int = 2,
    samples: int | None = None,
    seed: int = 0,
    condition: str = "hypersheaf",
    supplied: Sequence[SetPresheaf] = (),
    max_attempts: int | None = None,
) -> RoundtripReport:
    """Check that restriction and right Kan extension are inverse on (hyper)sheaves.

    Basis presheaves are enumerated exhaustively (``samples`` None) or drawn
    at random until ``samples`` distinct ones pass the condition.  Those
    failing the condition are counted as rejected.  Every accepted one must
    extend to a (hyper)sheaf on all opens that restricts back bijectively.
    Every (hyper)sheaf on all opens with values of size <= cap must be
    bijective to the extension of its restriction.  ``supplied`` presheaves
    on the basis are treated as claimed (hyper)sheaves: failing the
    condition is a failure, not a rejection.
    """
    if condition not in ("hypersheaf", "sheaf"):
        raise ValueError(f"unknown condition {condition!r}")
    whole = Basis.all_opens(space)
    report = RoundtripReport(
        space.points,
        tuple(space.show(B) for B in basis.members),
        condition,
        cap,
        samples,
        seed,
    )
    if condition == "hypersheaf":
        basis_suite = hypercover_suite(basis)
        space_suite = hypercover_suite(whole, allow_empty=True)
        report.suite_sizes = {"basis": len(basis_suite), "space": len(space_suite)}

        def basis_ok(F):
            return check_hypersheaf(F, basis_suite)

        def space_ok(G):
            return check_hypersheaf(G, space_suite)

        local = _local_check("hypersheaf", space_suite, space.opens, True)
    else:
        def basis_ok(F):
            return check_sheaf_on_basis(F, basis)

        def space_ok(G):
            return check_sheaf(G)

        local = _local_check("sheaf", None, space.opens, True)

    def fail(kind: str, F: SetPresheaf, witness: dict | None) -> None:
        report.failures.append({"check": kind, "presheaf": F.to_dict(), "witness": witness})

    def forward(F: SetPresheaf) -> None:
        ext = right_kan_extend(F, space)
        ok, witness = space_ok(ext.presheaf)
        if not ok:
            fail("extension-not-" + condition, F, witness)
            return
        ok, witness = unit_comparison(F, ext, basis.members)
        if not ok:
            fail("restriction-not-bijective", F, witness)

    for F in supplied:
        if set(F.index) != set(basis.members):
            raise PresheafError("supplied presheaf is not indexed by the basis")
        report.supplied_checked += 1
        ok, witness = basis_ok(F)
        if not ok:
            fail("supplied-not-" + condition, F, witness)
            continue
        forward(F)

    if samples is None:
        candidates: Iterable[SetPresheaf] = enumerate_presheaves(space, basis.members, cap)
    else:
        candidates = _sampled(space, basis.members, cap, seed, max_attempts or 50 * max(samples, 1))
    for F in candidates:
        if samples is not None and report.basis_accepted >= samples:
            break
        report.basis_considered += 1
        if not basis_ok(F)[0]:
            report.basis_rejected += 1
            continue
        report.basis_accepted += 1
        forward(F)

    for G in enumerate_presheaves(space, space.opens, cap, accept=local):
        report.space_accepted += 1
        ext = right_kan_extend(G.restrict_to(basis.members), space)
        ok, witness = unit_comparison(G, ext, space.opens)
        if not ok:
            fail("not-extended-from-basis", G, witness)
    return report


def _sampled(space: FiniteSpace, index: Sequence[int], cap: int, seed: int, attempts: int) -> Iterator[SetPresheaf]:
    rng = random.Random(seed)
    seen = set()
    for _ in range(attempts):
        F = random_presheaf(space, index, cap, rng)
        if F is None or F.key() in seen:
            continue
        seen.add(F.key())
        yield F
