"""Hypercovers of finite spaces and their refinements to a basis.

A hypercover is a spine K together with an open U(x) for each nondegenerate
simplex x (degenerate simplices take the open of their core).  The covering
condition says that for every boundary sphere tau the fillers' opens cover
exactly the intersection of the facets' opens; in dimension 0 the vertex
opens cover the target.

The refinement K^B decorates each n-simplex sigma of K with an antitone map
O from nonempty subsets of [n] to basis members, O(A) inside the open of the
face of sigma spanned by A.  Its open is O([n]).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping, Sequence

from .maps import FinMap, MonotoneMap, monotone_maps
from .simplicial import (
    BoundarySphere,
    FiniteTypeSimplicialSet,
    SimplexRef,
    SimplicialError,
    TruncationError,
    _filler_index,
    _iter_spheres,
    nondegenerate,
    sequence_complex,
    standard_simplex,
)
from .symmetrization import SymElement, minimal_representative, symmetrize
from .topology import Basis, FiniteSpace, NotACover, TopologyError, popcount


class Hypercover:
    def __init__(
        self,
        spine: FiniteTypeSimplicialSet,
        space: FiniteSpace,
        target: int,
        assignment: Mapping[tuple[int, int], int],
    ) -> None:
        if not space.is_open(target):
            raise TopologyError(f"target {space.show(target)} is not open")
        for d, count in enumerate(spine.counts):
            for k in range(count):
                if (d, k) not in assignment:
                    raise SimplicialError(f"simplex ({d},{k}) has no open assigned")
                U = assignment[(d, k)]
                if not space.is_open(U) or U & ~target:
                    raise TopologyError(
                        f"simplex ({d},{k}) is assigned {space.show(U)}, not an open of the target"
                    )
        self.spine = spine
        self.space = space
        self.target = target
        self.assignment = dict(assignment)

    @property
    def max_dim(self) -> int:
        return self.spine.max_dim

    def open_of(self, ref: SimplexRef) -> int:
        return self.assignment[(ref.core_dim, ref.core)]

    def opens_used(self) -> set[int]:
        return set(self.assignment.values())

    def check_functorial(self) -> tuple[SimplexRef, int] | None:
        """First (simplex, face index) whose open is not inside its face's open."""
        K = self.spine
        for d in range(1, K.max_dim + 1):
            for x in K.nondegenerate(d):
                for i, f in enumerate(K.face_table(d, x.core)):
                    if self.open_of(x) & ~self.open_of(f):
                        return x, i
        return None

    def with_assignment(self, changes: Mapping[tuple[int, int], int]) -> "Hypercover":
        new = dict(self.assignment)
        new.update(changes)
        return Hypercover(self.spine, self.space, self.target, new)

    def to_dict(self) -> dict:
        sp = self.space
        return {
            "target": list(sp.names(self.target)),
            "spine": self.spine.to_dict(),
            "assignment": [
                [d, k, list(sp.names(U))] for (d, k), U in sorted(self.assignment.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, space: FiniteSpace) -> "Hypercover":
        spine = FiniteTypeSimplicialSet.from_dict(data["spine"])
        assignment = {(int(d), int(k)): space.mask(names) for d, k, names in data["assignment"]}
        return cls(spine, space, space.mask(data["target"]), assignment)


def default_check_dimension(H: Hypercover) -> int:
    return max(0, min(H.spine.top_dimension() + 1, H.max_dim))


def check_hypercover(H: Hypercover, N: int | None = None) -> tuple[bool, dict | None]:
    """Check the covering condition in dimensions 0..N.

    The witness is ``{"n", "sphere", "lhs", "rhs"}`` for the first failure,
    where ``lhs`` is the union of filler opens and ``rhs`` the intersection
    of facet opens (the target in dimension 0).
    """
    if N is None:
        N = default_check_dimension(H)
    if N > H.max_dim:
        raise TruncationError(f"cannot check dimension {N} past truncation {H.max_dim}")
    K = H.spine
    lhs = 0
    for v in K.nondegenerate(0):
        lhs |= H.open_of(v)
    if lhs != H.target:
        return False, {"n": 0, "sphere": None, "lhs": lhs, "rhs": H.target}
    for n in range(1, N + 1):
        table = _filler_index(K, n)
        for sphere in _iter_spheres(K, n):
            rhs = H.target
            for t in sphere.facets:
                rhs &= H.open_of(t)
            lhs = 0
            for s in table.get(sphere.facets, ()):
                lhs |= H.open_of(s)
            if lhs != rhs:
                return False, {"n": n, "sphere": sphere, "lhs": lhs, "rhs": rhs}
    return True, None


def trivial_hypercover(space: FiniteSpace, U: int, N: int = 2) -> Hypercover:
    return Hypercover(standard_simplex(0, max_dim=N), space, U, {(0, 0): U})


def cech_from_cover(
    space: FiniteSpace, opens: Sequence[int], N: int, target: int | None = None
) -> Hypercover:
    """Cech hypercover of an indexed family.

    The spine is the nerve of the codiscrete groupoid on the index set;
    nondegenerate simplices are index tuples with consecutive entries
    distinct, sent to the intersection of the indexed opens.
    """
    union = 0
    for U in opens:
        if not space.is_open(U):
            raise TopologyError(f"{space.show(U)} is not open")
        union |= U
    if target is None:
        target = space.full
    if union != target:
        raise NotACover(f"the family does not cover {space.show(target)}")
    idx = range(len(opens))
    levels: list[list[tuple[int, ...]]] = [[(i,) for i in idx]]
    for _ in range(N):
        levels.append([t + (i,) for t in levels[-1] for i in idx if i != t[-1]])
    spine = sequence_complex(N, levels)
    assignment = {}
    for d, level in enumerate(spine.labels):
        for k, t in enumerate(level):
            U = target
            for i in t:
                U &= opens[i]
            assignment[(d, k)] = U
    return Hypercover(spine, space, target, assignment)


@dataclass(frozen=True)
class ConeDiagram:
    """A hypercover diagram completed by a cone tip labelled by the empty simplex."""

    hypercover: Hypercover
    tip: int

    def value(self, ref: SimplexRef | None) -> int:
        return self.tip if ref is None else self.hypercover.open_of(ref)


def cone_extension(H: Hypercover) -> ConeDiagram:
    return ConeDiagram(H, H.target)


# -- refinement to a basis ---------------------------------------------------

# a decorated simplex (sigma, O) with O listed by subset mask 1..2^(n+1)-1
Decorated = tuple[SimplexRef, tuple[int, ...]]


def _subset_order(n: int) -> list[int]:
    return sorted(range(1, 1 << (n + 1)), key=lambda A: (popcount(A), A))


def _antitone_maps(
    n: int, bounds: Mapping[int, int], members: Sequence[int], lower: int = 0
) -> Iterator[tuple[int, ...]]:
    """Antitone maps from nonempty subsets of [n] to basis members.

    ``bounds[A]`` is an open that O(A) must lie inside; every value must
    contain ``lower``.
    """
    order = _subset_order(n)
    size = (1 << (n + 1)) - 1
    values = [0] * size
    subs = {A: [A & ~(1 << i) for i in range(n + 1) if A >> i & 1 and A != 1 << i] for A in order}

    def assign(pos: int) -> Iterator[tuple[int, ...]]:
        if pos == len(order):
            yield tuple(values)
            return
        A = order[pos]
        bound = bounds[A]
        for S in subs[A]:
            bound &= values[S - 1]
        if lower & ~bound:
            return
        for B in members:
            if B & ~bound == 0 and lower & ~B == 0:
                values[A - 1] = B
                yield from assign(pos + 1)

    yield from assign(0)


def _pull_decoration(O: tuple[int, ...], theta: FinMap) -> tuple[int, ...]:
    m = theta.source_dim
    return tuple(O[theta.image_of(A) - 1] for A in range(1, 1 << (m + 1)))


class RefinedHypercover(Hypercover):
    """The basis refinement (K^B, U^B) of a hypercover, truncated at ``N``.

    ``elements[n]`` lists every n-simplex of K^B, degenerate ones included,
    as decorated simplices; the spine stores the nondegenerate ones.
    """

    def __init__(
        self,
        base: Hypercover,
        basis: Basis,
        N: int,
        *,
        upper: int | None = None,
        lower: int = 0,
    ) -> None:
        if basis.space != base.space:
            raise TopologyError("basis and hypercover live on different spaces")
        if N > base.max_dim:
            raise TruncationError(f"refinement level {N} exceeds spine truncation {base.max_dim}")
        self.base = base
        self.basis = basis
        self.upper = base.target if upper is None else upper & base.target
        self.lower = lower
        K = base.spine
        members = [B for B in basis.members if B & ~self.upper == 0]
        self.elements: list[list[Decorated]] = []
        for n in range(N + 1):
            level: list[Decorated] = []
            for sigma in K.all_simplices(n):
                bounds = {
                    A: base.open_of(K.pullback(sigma, MonotoneMap.inclusion(n, A)))
                    for A in range(1, 1 << (n + 1))
                }
                for O in _antitone_maps(n, bounds, members, lower):
                    level.append((sigma, O))
            self.elements.append(level)

        self._decomp: dict[Decorated, tuple[MonotoneMap, Decorated]] = {}
        nondeg: list[list[Decorated]] = []
        for n in range(N + 1):
            nondeg.append([x for x in self.elements[n] if self._degeneracy_index(x) is None])
        ids = {x: k for level in nondeg for k, x in enumerate(level)}
        faces = []
        for n, level in enumerate(nondeg):
            row = []
            for x in level:
                if n == 0:
                    row.append(())
                    continue
                refs = []
                for i in range(n + 1):
                    surj, core = self.decompose(self.pull(x, MonotoneMap.coface(n, i)))
                    refs.append(SimplexRef(surj, ids[core]))
                row.append(tuple(refs))
            faces.append(row)
        spine = FiniteTypeSimplicialSet(N, faces, nondeg)
        assignment = {
            (n, k): x[1][-1] for n, level in enumerate(nondeg) for k, x in enumerate(level)
        }
        target = base.target if upper is None else upper & base.target
        super().__init__(spine, base.space, target, assignment)

    def pull(self, x: Decorated, theta: MonotoneMap) -> Decorated:
        sigma, O = x
        return self.base.spine.pullback(sigma, theta), _pull_decoration(O, theta)

    def _degeneracy_index(self, x: Decorated) -> int | None:
        n = x[0].dim
        for j in range(n):
            face = self.pull(x, MonotoneMap.coface(n, j))
            if self.pull(face, MonotoneMap.codegeneracy(n - 1, j)) == x:
                return j
        return None

    def decompose(self, x: Decorated) -> tuple[MonotoneMap, Decorated]:
        """Eilenberg-Zilber decomposition of a decorated simplex."""
        hit = self._decomp.get(x)
        if hit is not None:
            return hit
        n = x[0].dim
        j = self._degeneracy_index(x)
        if j is None:
            out = (MonotoneMap.identity(n), x)
        else:
            inner, core = self.decompose(self.pull(x, MonotoneMap.coface(n, j)))
            out = (inner.compose(MonotoneMap.codegeneracy(n - 1, j)), core)
        self._decomp[x] = out
        return out

    def decorated(self, ref: SimplexRef) -> Decorated:
        """The decorated simplex denoted by a ref of the refined spine."""
        core = self.spine.label(ref)
        return self.pull(core, ref.degeneracy)

    def project(self, ref: SimplexRef) -> SimplexRef:
        """The projection to the base spine."""
        return self.decorated(ref)[0]

    def check_refinement(self) -> tuple[Decorated, int] | None:
        """First simplex violating U^B(x) inside U(pi(x)), or None."""
        for level in self.elements:
            for x in level:
                if x[1][-1] & ~self.base.open_of(x[0]):
                    return x, x[1][-1]
        return None

    def check_projection(self) -> tuple[SimplexRef, int] | None:
        """First (nondegenerate simplex, face) where pi fails to commute with faces."""
        K = self.spine
        base = self.base.spine
        for n in range(1, K.max_dim + 1):
            for x in K.nondegenerate(n):
                for i in range(n + 1):
                    if self.project(K.face(x, i)) != base.face(self.project(x), i):
                        return x, i
        return None

    def level_sizes(self) -> list[int]:
        return [len(level) for level in self.elements]


def refine_to_basis(H: Hypercover, basis: Basis, N: int = 2) -> RefinedHypercover:
    return RefinedHypercover(H, basis, N)


def restrict_below(R: RefinedHypercover, B0: int) -> RefinedHypercover:
    """Sub-hypercover of decorated simplices with every O(A) inside B0."""
    if B0 not in R.basis:
        raise TopologyError(f"{R.space.show(B0)} is not a basis member")
    return RefinedHypercover(R.base, R.basis, R.max_dim, upper=B0 & R.upper, lower=R.lower)


def super_slice(R: RefinedHypercover, B0: int) -> FiniteTypeSimplicialSet:
    """Simplicial subset of simplices whose open contains B0."""
    sub = RefinedHypercover(R.base, R.basis, R.max_dim, upper=R.upper, lower=B0 | R.lower)
    return sub.spine


# -- categorification and symmetrized refinement --------------------------


class CategorifiedRefinement:
    """The levels of K^B ordered by (sigma, O) <= (sigma, O') iff O(A) inside O'(A)."""

    def __init__(self, R: RefinedHypercover) -> None:
        self.refinement = R
        self.elements = R.elements

    @staticmethod
    def leq(x: Decorated, y: Decorated) -> bool:
        return x[0] == y[0] and all(a & ~b == 0 for a, b in zip(x[1], y[1]))

    def poset(self, n: int):
        from .homotopy import FinitePoset

        level = self.elements[n]
        return FinitePoset.from_relation(level, self.leq)


def categorify(R: RefinedHypercover) -> CategorifiedRefinement:
    return CategorifiedRefinement(R)


SymDecorated = tuple[SymElement, tuple[int, ...]]


class SymRefinement:
    """Levels of S(K)^B: pairs ([sigma, f], O) with O(A) inside U of the face f(A)."""

    def __init__(self, R: RefinedHypercover) -> None:
        base = R.base
        K = base.spine
        self.refinement = R
        self.sym = symmetrize(K, R.max_dim)
        members = [B for B in R.basis.members if B & ~R.upper == 0]
        self.levels: list[list[SymDecorated]] = []
        for n in range(R.max_dim + 1):
            level = []
            for e in self.sym.level(n):
                core = nondegenerate(e.core_dim, e.core)
                bounds = {}
                for A in range(1, 1 << (n + 1)):
                    fA = e.surj.image_of(A)
                    bounds[A] = base.open_of(
                        K.pullback(core, MonotoneMap.inclusion(e.core_dim, fA))
                    )
                for O in _antitone_maps(n, bounds, members, R.lower):
                    level.append((e, O))
            self.levels.append(level)
        self._members = [set(level) for level in self.levels]

    def contains(self, x: SymDecorated) -> bool:
        return x in self._members[x[0].level]

    def act(self, x: SymDecorated, h: FinMap) -> SymDecorated:
        e, O = x
        return self.sym.act(e, h), _pull_decoration(O, h)

    @staticmethod
    def open_of(x: SymDecorated) -> int:
        return x[1][-1]

    def from_refined(self, x: Decorated) -> SymDecorated:
        sigma, O = x
        K = self.refinement.base.spine
        return minimal_representative(K, sigma, MonotoneMap.identity(sigma.dim)), O

    def check_square(self) -> dict | None:
        """Check the comparison K^B -> S(K)^B on the stored levels.

        It must land in S(K)^B, preserve the assigned open and commute with
        all monotone maps between stored levels.  Returns the first failure.
        """
        R = self.refinement
        top = R.max_dim
        for n in range(top + 1):
            for x in R.elements[n]:
                image = self.from_refined(x)
                if not self.contains(image):
                    return {"kind": "not-in-image", "element": x}
                if self.open_of(image) != x[1][-1]:
                    return {"kind": "open-mismatch", "element": x}
                for m in range(top + 1):
                    for theta in monotone_maps(m, n):
                        lhs = self.from_refined(R.pull(x, theta))
                        rhs = self.act(image, theta)
                        if lhs != rhs:
                            return {"kind": "not-natural", "element": x, "map": theta}
        return None


def sym_refine(R: RefinedHypercover) -> SymRefinement:
    return SymRefinement(R)


def label_of(H: Hypercover, ref: SimplexRef) -> Hashable:
    return H.spine.label(ref)


def describe_sphere(H: Hypercover, sphere: BoundarySphere | None) -> list | None:
    if sphere is None:
        return None
    out = []
    for t in sphere.facets:
        out.append({"degeneracy": list(t.degeneracy.values), "core": repr(H.spine.label(t))})
    return out
