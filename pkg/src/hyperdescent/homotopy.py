"""Nerves of finite posets, contractibility verdicts and coinitiality checks.

Weak contractibility of a finite poset is not decided here.  A verdict is

* ``contractible`` when beat-point removal dismantles the poset to a point
  (or, for simplicial sets, a cone apex is found),
* ``obstructed`` when some reduced homology group in the checked range is
  nonzero (this includes the empty poset, via degree -1),
* ``unknown`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .homology import HomologyGroup, first_nonzero, reduced_homology
from .maps import collapse_runs
from .simplicial import FiniteTypeSimplicialSet, sequence_complex
from .symmetrization import SymElement, sym_slice_complex, symmetrize

CONTRACTIBLE = "contractible"
OBSTRUCTED = "obstructed"
UNKNOWN = "unknown"


class PosetError(ValueError):
    pass


class FinitePoset:
    """Finite partial order on hashable elements, stored as a reflexive relation."""

    def __init__(self, elements: Iterable[Hashable], leq: Iterable[tuple[Hashable, Hashable]]):
        self.elements: tuple[Hashable, ...] = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise PosetError("duplicate elements")
        self._pos = {x: i for i, x in enumerate(self.elements)}
        rel = {(x, x) for x in self.elements}
        for x, y in leq:
            if x not in self._pos or y not in self._pos:
                raise PosetError(f"relation {x!r} <= {y!r} mentions unknown elements")
            rel.add((x, y))
        self._leq = frozenset(rel)
        self._validate()

    @classmethod
    def from_relation(cls, elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool]):
        return cls(elements, [(x, y) for x in elements for y in elements if leq(x, y)])

    @classmethod
    def from_covers(cls, elements: Sequence[Hashable], covers: Iterable[tuple[Hashable, Hashable]]):
        """Poset generated by ``x < y`` pairs under transitive closure."""
        succ: dict[Hashable, set] = {x: set() for x in elements}
        for x, y in covers:
            succ[x].add(y)
        rel = []
        for x in elements:
            seen, stack = set(), [x]
            while stack:
                z = stack.pop()
                for w in succ[z]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            rel.extend((x, y) for y in seen)
        return cls(elements, rel)

    def _validate(self) -> None:
        for x, y in self._leq:
            if x != y and (y, x) in self._leq:
                raise PosetError(f"{x!r} and {y!r} violate antisymmetry")
        for x, y in self._leq:
            for z in self.elements:
                if (y, z) in self._leq and (x, z) not in self._leq:
                    raise PosetError(f"{x!r} <= {y!r} <= {z!r} violates transitivity")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: Hashable) -> bool:
        return x in self._pos

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.elements)!r})"

    def leq(self, x: Hashable, y: Hashable) -> bool:
        return (x, y) in self._leq

    def relations(self) -> list[tuple[Hashable, Hashable]]:
        return [(x, y) for x in self.elements for y in self.elements if x != y and self.leq(x, y)]

    def strictly_above(self, x: Hashable) -> list[Hashable]:
        return [y for y in self.elements if y != x and self.leq(x, y)]

    def strictly_below(self, x: Hashable) -> list[Hashable]:
        return [y for y in self.elements if y != x and self.leq(y, x)]

    def subposet(self, keep: Iterable[Hashable]) -> "FinitePoset":
        keep = set(keep)
        elems = [x for x in self.elements if x in keep]
        return FinitePoset(elems, [(x, y) for x, y in self._leq if x in keep and y in keep])

    def minimum(self, subset: Sequence[Hashable]) -> Hashable | None:
        for x in subset:
            if all(self.leq(x, y) for y in subset):
                return x
        return None

    def maximum(self, subset: Sequence[Hashable]) -> Hashable | None:
        for x in subset:
            if all(self.leq(y, x) for y in subset):
                return x
        return None

    def chains(self, length: int) -> list[tuple[int, ...]]:
        """Strict chains of ``length`` elements, as position tuples."""
        n = len(self.elements)
        lt = [[i != j and self.leq(self.elements[i], self.elements[j]) for j in range(n)] for i in range(n)]
        level = [(i,) for i in range(n)]
        for _ in range(length - 1):
            level = [c + (j,) for c in level for j in range(n) if lt[c[-1]][j]]
        return level

    def to_dict(self) -> dict:
        return {
            "elements": [str(x) for x in self.elements],
            "less": [[str(x), str(y)] for x, y in self.relations()],
        }


def nerve(P: FinitePoset, N: int) -> FiniteTypeSimplicialSet:
    """Nerve truncated at N: nondegenerate n-simplices are strict chains."""
    return sequence_complex(N, [P.chains(d + 1) for d in range(N + 1)])


def homology(K: FiniteTypeSimplicialSet, max_degree: int) -> list[HomologyGroup]:
    return reduced_homology(K, max_degree)


def beat_point_reduce(P: FinitePoset) -> tuple[FinitePoset, list[dict]]:
    """Remove beat points until none remain.

    An element is a beat point when its strict up-set has a minimum or its
    strict down-set has a maximum.  The certificate records each removal
    in order as ``{"removed", "kind", "via"}``.
    """
    current = P
    certificate: list[dict] = []
    while len(current) > 1:
        for x in current.elements:
            above = current.strictly_above(x)
            low = current.minimum(above) if above else None
            if low is not None:
                certificate.append({"removed": x, "kind": "up", "via": low})
                break
            below = current.strictly_below(x)
            high = current.maximum(below) if below else None
            if high is not None:
                certificate.append({"removed": x, "kind": "down", "via": high})
                break
        else:
            break
        current = current.subposet(y for y in current.elements if y != x)
    return current, certificate


@dataclass
class ContractibilityVerdict:
    status: str
    certificate: list = field(default_factory=list)
    degree: int | None = None
    homology: HomologyGroup | None = None

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.certificate:
            out["certificate"] = [
                {k: str(v) if k in ("removed", "via") else v for k, v in step.items()}
                for step in self.certificate
            ]
        if self.homology is not None:
            out["degree"] = self.degree
            out["rank"] = self.homology.rank
            out["torsion"] = list(self.homology.torsion)
        return out


def is_weakly_contractible(P: FinitePoset, homology_degree: int = 3) -> ContractibilityVerdict:
    if len(P) == 0:
        return ContractibilityVerdict(OBSTRUCTED, degree=-1, homology=HomologyGroup(-1, 1, ()))
    core, cert = beat_point_reduce(P)
    if len(core) == 1:
        return ContractibilityVerdict(CONTRACTIBLE, certificate=cert)
    groups = reduced_homology(nerve(core, homology_degree + 1), homology_degree)
    bad = first_nonzero(groups)
    if bad is not None:
        return ContractibilityVerdict(OBSTRUCTED, degree=bad.degree, homology=bad)
    return ContractibilityVerdict(UNKNOWN, certificate=cert)


def cone_apex(K: FiniteTypeSimplicialSet) -> Hashable | None:
    """A vertex v of a sequence complex with every simplex s extendable to (s, v).

    Only simplices below the truncation are inspected.
    """
    vertices = [lab[0] for lab in K.labels[0]]
    known = {lab for level in K.labels for lab in level}
    for v in vertices:
        if all(
            collapse_runs(seq + (v,))[0] in known
            for d in range(K.max_dim)
            for seq in K.labels[d]
        ):
            return v
    return None


def simplicial_verdict(K: FiniteTypeSimplicialSet, homology_degree: int) -> ContractibilityVerdict:
    """Verdict for a sequence complex truncated at ``homology_degree + 1`` or more."""
    groups = reduced_homology(K, homology_degree)
    bad = first_nonzero(groups)
    if bad is not None:
        return ContractibilityVerdict(OBSTRUCTED, degree=bad.degree, homology=bad)
    apex = cone_apex(K)
    if apex is not None:
        return ContractibilityVerdict(
            CONTRACTIBLE, certificate=[{"cone_apex": apex, "through_dim": K.max_dim}]
        )
    return ContractibilityVerdict(UNKNOWN)


@dataclass(frozen=True)
class PosetMap:
    """Order-preserving map between finite posets."""

    source: FinitePoset
    target: FinitePoset
    mapping: Mapping[Hashable, Hashable]

    def __post_init__(self) -> None:
        for x in self.source.elements:
            if x not in self.mapping or self.mapping[x] not in self.target:
                raise PosetError(f"{x!r} has no image in the target")
        for x, y in self.source.relations():
            if not self.target.leq(self.mapping[x], self.mapping[y]):
                raise PosetError(f"map does not preserve {x!r} <= {y!r}")

    @classmethod
    def inclusion(cls, source: FinitePoset, target: FinitePoset) -> "PosetMap":
        return cls(source, target, {x: x for x in source.elements})

    @classmethod
    def identity(cls, P: FinitePoset) -> "PosetMap":
        return cls.inclusion(P, P)


def slice_category(f: PosetMap, b: Hashable, side: str = "over") -> FinitePoset:
    """The comma poset f/b (side "over") or b/f (side "under")."""
    if b not in f.target:
        raise PosetError(f"{b!r} is not in the target")
    if side == "over":
        keep = [x for x in f.source.elements if f.target.leq(f.mapping[x], b)]
    elif side == "under":
        keep = [x for x in f.source.elements if f.target.leq(b, f.mapping[x])]
    else:
        raise ValueError(f"side must be 'over' or 'under', not {side!r}")
    return f.source.subposet(keep)


COINITIAL = "Coinitial"
NOT_COINITIAL = "NotCoinitial"


@dataclass
class CoinitialityReport:
    verdicts: dict
    aggregate: str

    def empty_slices(self) -> list:
        return [
            b for b, v in self.verdicts.items()
            if v.status == OBSTRUCTED and v.degree == -1
        ]

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "verdicts": {str(b): v.to_dict() for b, v in self.verdicts.items()},
            "empty_slices": [str(b) for b in self.empty_slices()],
        }


def check_coinitial(f: PosetMap, homology_degree: int = 3) -> CoinitialityReport:
    verdicts = {b: is_weakly_contractible(slice_category(f, b, "over"), homology_degree)
                for b in f.target.elements}
    statuses = {v.status for v in verdicts.values()}
    if OBSTRUCTED in statuses:
        aggregate = NOT_COINITIAL
    elif statuses <= {CONTRACTIBLE}:
        aggregate = COINITIAL
    else:
        aggregate = UNKNOWN
    return CoinitialityReport(verdicts, aggregate)


def verify_sym_coinitiality_instance(
    K: FiniteTypeSimplicialSet, level_bound: int, homology_degree: int = 2
) -> dict:
    """Verdicts for the slices of Delta/K over each class of S(K) up to ``level_bound``.

    Each slice is modelled by the simplicial set whose category of
    simplices it is, truncated one above the checked homology degree.
    """
    S = symmetrize(K, level_bound)
    entries = []
    counts = {CONTRACTIBLE: 0, OBSTRUCTED: 0, UNKNOWN: 0}
    for n in range(level_bound + 1):
        for e in S.level(n):
            H = sym_slice_complex(K, e, homology_degree + 1)
            verdict = simplicial_verdict(H, homology_degree)
            counts[verdict.status] += 1
            entries.append({"level": n, "element": str(e), "verdict": verdict.to_dict()})
    return {
        "level_bound": level_bound,
        "homology_degree": homology_degree,
        "counts": counts,
        "ok": counts[OBSTRUCTED] == 0,
        "entries": entries,
    }


# -- the inclusion of two glued triangles -----------------------------------


def glued_triangle_posets() -> tuple[FinitePoset, FinitePoset]:
    """An edge glued to a horn at a vertex, inside two triangles glued along an edge.

    Vertices 0, 1, 2 span the first triangle and 0', 1, 2 the second; the
    horn is 0 -> 1, 0 -> 2 and the extra edge is 0' -> 1.
    """
    elems = ("0", "0'", "1", "2")
    I = FinitePoset.from_covers(elems, [("0", "1"), ("0", "2"), ("0'", "1")])
    J = FinitePoset.from_covers(elems, [("0", "1"), ("0'", "1"), ("1", "2")])
    return I, J


def slice_counterexample(
    I: FinitePoset | None = None, J: FinitePoset | None = None, homology_degree: int = 3
) -> dict:
    """Check both halves: I -> J is coinitial, while the induced map of slices
    over the final vertex of J is not, with an empty comma poset."""
    default_I, default_J = glued_triangle_posets()
    I = default_I if I is None else I
    J = default_J if J is None else J
    first = check_coinitial(PosetMap.inclusion(I, J), homology_degree)
    v = J.maximum(list(J.elements))
    report: dict = {"first_half": first.to_dict(), "final_vertex": None if v is None else str(v)}
    if v is None or v not in I:
        report["second_half"] = None
        report["ok"] = False
        return report
    I_v = I.subposet(x for x in I.elements if I.leq(x, v))
    J_v = J.subposet(x for x in J.elements if J.leq(x, v))
    second = check_coinitial(PosetMap.inclusion(I_v, J_v), homology_degree)
    report["second_half"] = second.to_dict()
    report["ok"] = (
        first.aggregate == COINITIAL
        and second.aggregate == NOT_COINITIAL
        and bool(second.empty_slices())
    )
    return report
