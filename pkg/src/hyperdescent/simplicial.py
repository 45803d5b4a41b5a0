"""Finite-type simplicial sets in Eilenberg-Zilber normal form.

A simplicial set is stored through its nondegenerate simplices only: each
dimension ``d <= max_dim`` holds a list of nondegenerate simplices with stable
integer ids, and every such simplex of positive dimension records its faces as
``SimplexRef`` values.  A ``SimplexRef`` is a pair (surjection, core) and
denotes ``surjection^*(core)``; every simplex, degenerate or not, has exactly
one such description, so equality of simplices is equality of refs.

All pullbacks along monotone maps are computed from the face tables by
factoring the map into a surjection followed by an injection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from .maps import MonotoneMap, collapse_runs, monotone_surjections


class SimplicialError(ValueError):
    pass


class TruncationError(SimplicialError):
    """An operation needed simplices above the stored truncation."""


@dataclass(frozen=True, order=False)
class SimplexRef:
    degeneracy: MonotoneMap
    core: int

    def __post_init__(self) -> None:
        if not self.degeneracy.is_surjective():
            raise SimplicialError(f"degeneracy {self.degeneracy} is not surjective")

    @property
    def dim(self) -> int:
        return self.degeneracy.source_dim

    @property
    def core_dim(self) -> int:
        return self.degeneracy.target_dim

    def is_degenerate(self) -> bool:
        return self.dim != self.core_dim

    def sort_key(self) -> tuple:
        return (self.core_dim, self.core, self.degeneracy.values)

    def __str__(self) -> str:
        if not self.is_degenerate():
            return f"x{self.core_dim}.{self.core}"
        return f"{list(self.degeneracy.values)}*x{self.core_dim}.{self.core}"


def nondegenerate(dim: int, core: int) -> SimplexRef:
    return SimplexRef(MonotoneMap.identity(dim), core)


@dataclass(frozen=True)
class BoundarySphere:
    """A map from the boundary of the n-simplex, given by its n+1 facets."""

    dim: int
    facets: tuple[SimplexRef, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(str(t) for t in self.facets) + ")"


class FiniteTypeSimplicialSet:
    """A simplicial set truncated at ``max_dim``.

    ``faces[d][k]`` is the tuple of the ``d + 1`` faces of the k-th
    nondegenerate d-simplex (empty for vertices).  ``labels`` optionally names
    nondegenerate simplices; labels are unique across all dimensions.
    """

    def __init__(
        self,
        max_dim: int,
        faces: Sequence[Sequence[Sequence[SimplexRef]]],
        labels: Sequence[Sequence[Hashable]] | None = None,
    ) -> None:
        if max_dim < 0:
            raise SimplicialError("max_dim must be non-negative")
        faces = [list(level) for level in faces]
        faces += [[] for _ in range(max_dim + 1 - len(faces))]
        if len(faces) != max_dim + 1:
            raise SimplicialError("more levels than max_dim allows")
        self.max_dim = max_dim
        self._faces: list[list[tuple[SimplexRef, ...]]] = [
            [tuple(fs) for fs in level] for level in faces
        ]
        self.counts = tuple(len(level) for level in self._faces)
        if labels is None:
            labels = [[(d, k) for k in range(c)] for d, c in enumerate(self.counts)]
        self.labels = [list(level) for level in labels]
        self._index: dict[Hashable, tuple[int, int]] = {}
        for d, level in enumerate(self.labels):
            if len(level) != self.counts[d]:
                raise SimplicialError(f"label count mismatch in dimension {d}")
            for k, lab in enumerate(level):
                if lab in self._index:
                    raise SimplicialError(f"duplicate label {lab!r}")
                self._index[lab] = (d, k)
        self._validate_faces()
        self._pullbacks: dict[tuple[SimplexRef, MonotoneMap], SimplexRef] = {}
        self._filler_index: dict[int, dict[tuple[SimplexRef, ...], list[SimplexRef]]] = {}

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_labels(
        cls,
        max_dim: int,
        levels: Sequence[Sequence[Hashable]],
        face: Callable[[Hashable, int], tuple[MonotoneMap, Hashable]],
    ) -> "FiniteTypeSimplicialSet":
        """Build from labelled nondegenerate simplices.

        ``face(label, i)`` returns ``(surjection, core_label)`` for the i-th
        face in normal form.
        """
        index = {}
        for d, level in enumerate(levels):
            for k, lab in enumerate(level):
                index[lab] = (d, k)
        faces: list[list[tuple[SimplexRef, ...]]] = []
        for d, level in enumerate(levels):
            row = []
            for lab in level:
                if d == 0:
                    row.append(())
                    continue
                refs = []
                for i in range(d + 1):
                    surj, core_lab = face(lab, i)
                    if core_lab not in index:
                        raise SimplicialError(
                            f"face {i} of {lab!r} has unknown core {core_lab!r}"
                        )
                    cd, ck = index[core_lab]
                    if surj.target_dim != cd:
                        raise SimplicialError(f"face {i} of {lab!r}: dimension mismatch")
                    refs.append(SimplexRef(surj, ck))
                row.append(tuple(refs))
            faces.append(row)
        return cls(max_dim, faces, [list(level) for level in levels])

    def _validate_faces(self) -> None:
        for d, level in enumerate(self._faces):
            for k, fs in enumerate(level):
                expected = d + 1 if d > 0 else 0
                if len(fs) != expected:
                    raise SimplicialError(f"simplex ({d},{k}) has {len(fs)} faces")
                for ref in fs:
                    if ref.dim != d - 1:
                        raise SimplicialError(f"face of ({d},{k}) has dimension {ref.dim}")
                    if ref.core >= self.counts[ref.core_dim]:
                        raise SimplicialError(f"face of ({d},{k}) names missing core")

    # -- basic access -----------------------------------------------------

    def __repr__(self) -> str:
        return f"FiniteTypeSimplicialSet(max_dim={self.max_dim}, counts={self.counts})"

    def is_empty(self) -> bool:
        return self.counts[0] == 0

    def simplex(self, dim: int, core: int) -> SimplexRef:
        if dim > self.max_dim or not 0 <= core < self.counts[dim]:
            raise SimplicialError(f"no nondegenerate simplex ({dim},{core})")
        return nondegenerate(dim, core)

    def by_label(self, label: Hashable) -> SimplexRef:
        d, k = self._index[label]
        return nondegenerate(d, k)

    def label(self, ref: SimplexRef) -> Hashable:
        return self.labels[ref.core_dim][ref.core]

    def nondegenerate(self, dim: int) -> list[SimplexRef]:
        if dim > self.max_dim:
            raise TruncationError(f"dimension {dim} exceeds truncation {self.max_dim}")
        return [nondegenerate(dim, k) for k in range(self.counts[dim])]

    def face_table(self, dim: int, core: int) -> tuple[SimplexRef, ...]:
        return self._faces[dim][core]

    def contains(self, ref: SimplexRef) -> bool:
        return ref.core_dim <= self.max_dim and ref.core < self.counts[ref.core_dim]

    def all_simplices(self, n: int) -> list[SimplexRef]:
        """Every n-simplex, degenerate ones included, in deterministic order."""
        if n > self.max_dim:
            # nondegenerate n-simplices would be needed but are not stored
            raise TruncationError(f"dimension {n} exceeds truncation {self.max_dim}")
        out = []
        for k in range(n + 1):
            for core in range(self.counts[k]):
                for s in monotone_surjections(n, k):
                    out.append(SimplexRef(s, core))
        return out

    def top_dimension(self) -> int:
        """Largest dimension holding a nondegenerate simplex (-1 if empty)."""
        top = -1
        for d, c in enumerate(self.counts):
            if c:
                top = d
        return top

    # -- simplicial operators ----------------------------------------------

    def pullback(self, ref: SimplexRef, theta: MonotoneMap) -> SimplexRef:
        """The simplex ``theta^*(ref)`` in normal form."""
        if theta.target_dim != ref.dim:
            raise SimplicialError(f"cannot pull back a {ref.dim}-simplex along {theta}")
        if not self.contains(ref):
            raise SimplicialError(f"simplex {ref} is not in this complex")
        key = (ref, theta)
        hit = self._pullbacks.get(key)
        if hit is not None:
            return hit
        phi = ref.degeneracy.compose(theta)
        inc, surj = phi.factorize()
        inner = self._restrict_injective(ref.core_dim, ref.core, inc)
        out = SimplexRef(inner.degeneracy.compose(surj), inner.core)
        self._pullbacks[key] = out
        return out

    def _restrict_injective(self, dim: int, core: int, inc: MonotoneMap) -> SimplexRef:
        if inc.source_dim == dim:
            return nondegenerate(dim, core)
        image = set(inc.values)
        r = max(i for i in range(dim + 1) if i not in image)
        shifted = MonotoneMap(
            inc.source_dim, dim - 1, tuple(v if v < r else v - 1 for v in inc.values)
        )
        return self.pullback(self._faces[dim][core][r], shifted)

    def face(self, ref: SimplexRef, i: int) -> SimplexRef:
        if ref.dim < 1 or not 0 <= i <= ref.dim:
            raise SimplicialError(f"face index {i} out of range for a {ref.dim}-simplex")
        return self.pullback(ref, MonotoneMap.coface(ref.dim, i))

    def faces(self, ref: SimplexRef) -> tuple[SimplexRef, ...]:
        return tuple(self.face(ref, i) for i in range(ref.dim + 1))

    def degeneracy(self, ref: SimplexRef, j: int) -> SimplexRef:
        return self.pullback(ref, MonotoneMap.codegeneracy(ref.dim, j))

    def vertex(self, ref: SimplexRef, i: int) -> SimplexRef:
        return self.pullback(ref, MonotoneMap(0, ref.dim, (i,)))

    def check_simplicial_identities(self, up_to: int | None = None):
        """Return the first (simplex, i, j) violating d_i d_j = d_{j-1} d_i, or None."""
        top = self.max_dim if up_to is None else min(up_to, self.max_dim)
        for d in range(2, top + 1):
            for x in self.nondegenerate(d):
                for j in range(d + 1):
                    for i in range(j):
                        lhs = self.face(self.face(x, j), i)
                        rhs = self.face(self.face(x, i), j - 1)
                        if lhs != rhs:
                            return (x, i, j)
        return None

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        levels = []
        for d in range(self.max_dim + 1):
            rows = []
            for k in range(self.counts[d]):
                rows.append(
                    {
                        "label": _label_text(self.labels[d][k]),
                        "faces": [
                            [list(f.degeneracy.values), f.core] for f in self._faces[d][k]
                        ],
                    }
                )
            levels.append(rows)
        return {"max_dim": self.max_dim, "levels": levels}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteTypeSimplicialSet":
        try:
            max_dim = int(data["max_dim"])
            faces, labels = [], []
            for d, rows in enumerate(data["levels"]):
                level_faces, level_labels = [], []
                for row in rows:
                    refs = []
                    for values, core in row.get("faces", []):
                        values = tuple(int(v) for v in values)
                        refs.append(
                            SimplexRef(MonotoneMap(d - 1, max(values), values), int(core))
                        )
                    level_faces.append(tuple(refs))
                    level_labels.append(str(row["label"]))
                faces.append(level_faces)
                labels.append(level_labels)
        except (KeyError, TypeError, ValueError) as exc:
            raise SimplicialError(f"malformed complex description: {exc}") from exc
        return cls(max_dim, faces, labels)

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_text(cls, text: str) -> "FiniteTypeSimplicialSet":
        return cls.from_dict(json.loads(text))


def _label_text(label: Hashable) -> str:
    if isinstance(label, str):
        return label
    return repr(label)


# -- operations ----------------------------------------------------------


def face(K: FiniteTypeSimplicialSet, s: SimplexRef, i: int) -> SimplexRef:
    return K.face(s, i)


def normalize(
    K: FiniteTypeSimplicialSet, word: Sequence[MonotoneMap], start: SimplexRef
) -> SimplexRef:
    """Apply the operators of ``word`` to ``start`` in order, in normal form.

    ``word[0]`` acts first, so its target must be ``start``'s dimension and
    ``word[k+1]`` must land in the source of ``word[k]``.
    """
    theta = MonotoneMap.identity(start.dim)
    for op in word:
        if op.target_dim != theta.source_dim:
            raise SimplicialError(f"word is not composable at {op}")
        theta = theta.compose(op)
    return K.pullback(start, theta)


def _facets_of(K: FiniteTypeSimplicialSet, ref: SimplexRef) -> tuple[SimplexRef, ...]:
    return K.faces(ref) if ref.dim > 0 else ()


def enumerate_boundary_spheres(
    K: FiniteTypeSimplicialSet, n: int, dim_bound: int | None = None
) -> list[BoundarySphere]:
    """All compatible facet tuples (tau_0, ..., tau_n) of (n-1)-simplices."""
    if dim_bound is None:
        dim_bound = K.max_dim + 1
    if dim_bound > K.max_dim + 1:
        raise TruncationError(f"bound {dim_bound} exceeds truncation {K.max_dim} + 1")
    if not 1 <= n <= dim_bound:
        raise SimplicialError(f"sphere dimension {n} outside 1..{dim_bound}")
    return list(_iter_spheres(K, n))


def _iter_spheres(K: FiniteTypeSimplicialSet, n: int) -> Iterator[BoundarySphere]:
    simplices = K.all_simplices(n - 1)
    if n == 1:
        for a in simplices:
            for b in simplices:
                yield BoundarySphere(1, (a, b))
        return
    face_cache = {s: _facets_of(K, s) for s in simplices}
    # tau_j is constrained on its faces 0..j-1, so bucket by that prefix
    buckets: list[dict[tuple, list[SimplexRef]]] = []
    for j in range(n + 1):
        table: dict[tuple, list[SimplexRef]] = {}
        for s in simplices:
            table.setdefault(face_cache[s][:j], []).append(s)
        buckets.append(table)

    chosen: list[SimplexRef] = []

    def extend(j: int) -> Iterator[BoundarySphere]:
        if j == n + 1:
            yield BoundarySphere(n, tuple(chosen))
            return
        # d_i tau_j = d_{j-1} tau_i for i < j
        prefix = tuple(face_cache[chosen[i]][j - 1] for i in range(j))
        for s in buckets[j].get(prefix, ()):
            chosen.append(s)
            yield from extend(j + 1)
            chosen.pop()

    yield from extend(0)


def is_sphere(K: FiniteTypeSimplicialSet, sphere: BoundarySphere) -> bool:
    n = sphere.dim
    if len(sphere.facets) != n + 1:
        return False
    if any(t.dim != n - 1 or not K.contains(t) for t in sphere.facets):
        return False
    if n == 1:
        return True
    for j in range(n + 1):
        for i in range(j):
            if K.face(sphere.facets[j], i) != K.face(sphere.facets[i], j - 1):
                return False
    return True


def _filler_index(K: FiniteTypeSimplicialSet, n: int):
    table = K._filler_index.get(n)
    if table is None:
        table = {}
        for s in K.all_simplices(n):
            table.setdefault(K.faces(s), []).append(s)
        K._filler_index[n] = table
    return table


def fillers(K: FiniteTypeSimplicialSet, sphere: BoundarySphere) -> list[SimplexRef]:
    """All n-simplices (degenerate ones included) whose boundary is ``sphere``."""
    if not is_sphere(K, sphere):
        raise SimplicialError(f"{sphere} is not a boundary sphere in this complex")
    if sphere.dim > K.max_dim:
        raise TruncationError(f"fillers of dimension {sphere.dim} are past the truncation")
    return list(_filler_index(K, sphere.dim).get(sphere.facets, ()))


def is_trivial_kan_up_to(
    K: FiniteTypeSimplicialSet, N: int
) -> tuple[bool, BoundarySphere | None]:
    """Whether K is nonempty and every sphere of dimension <= N has a filler.

    On failure the second component is the first unfilled sphere (``None``
    when K is empty).
    """
    if N > K.max_dim:
        raise TruncationError(f"cannot check dimension {N} past truncation {K.max_dim}")
    if K.is_empty():
        return False, None
    for n in range(1, N + 1):
        table = _filler_index(K, n)
        for sphere in _iter_spheres(K, n):
            if sphere.facets not in table:
                return False, sphere
    return True, None


# -- constructors ----------------------------------------------------------


def sequence_complex(
    max_dim: int, levels: Sequence[Sequence[tuple]]
) -> FiniteTypeSimplicialSet:
    """Simplicial subset of the nerve of a codiscrete groupoid.

    Simplices are vertex sequences; nondegenerate ones have consecutive
    entries distinct.  ``levels[d]`` lists the nondegenerate d-simplices,
    and the family must be closed under deleting entries.
    """

    def seq_face(seq: tuple, i: int):
        core, surj = collapse_runs(seq[:i] + seq[i + 1 :])
        return surj, core

    return FiniteTypeSimplicialSet.from_labels(max_dim, levels, seq_face)


def standard_simplex(n: int, max_dim: int | None = None) -> FiniteTypeSimplicialSet:
    from itertools import combinations

    top = n if max_dim is None else max_dim
    levels = [list(combinations(range(n + 1), d + 1)) for d in range(top + 1)]
    return sequence_complex(top, levels)


def boundary_simplex(n: int, max_dim: int | None = None) -> FiniteTypeSimplicialSet:
    """The boundary of the n-simplex (so ``boundary_simplex(1)`` is two points)."""
    from itertools import combinations

    top = n if max_dim is None else max_dim
    levels = [
        list(combinations(range(n + 1), d + 1)) if d < n else [] for d in range(top + 1)
    ]
    return sequence_complex(top, levels)


def iter_all(K: FiniteTypeSimplicialSet, up_to: int) -> Iterable[SimplexRef]:
    for n in range(up_to + 1):
        yield from K.all_simplices(n)
