"""Symmetrization of simplicial sets along Delta^op -> Fin^op.

An element of S(K)_n is a class of pairs (sigma, f) with sigma in K_m and
f: <n> -> <m> an arbitrary map, modulo (sigma, g f) ~ (g^* sigma, f) for
weakly increasing g.  Every class has exactly one *minimal* representative,
with sigma nondegenerate and f surjective, and that is the only form stored
here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .maps import FinMap, MonotoneMap, fin_surjections
from .simplicial import (
    FiniteTypeSimplicialSet,
    SimplexRef,
    SimplicialError,
    nondegenerate,
    sequence_complex,
)


@dataclass(frozen=True)
class SymElement:
    """Minimal representative [core, surj] of an element of S(K)_level."""

    level: int
    core_dim: int
    core: int
    surj: FinMap

    def __post_init__(self) -> None:
        if self.surj.source_dim != self.level or self.surj.target_dim != self.core_dim:
            raise ValueError("surjection does not match level and core dimension")
        if not self.surj.is_surjective():
            raise ValueError(f"{self.surj} is not surjective")

    def __str__(self) -> str:
        return f"[x{self.core_dim}.{self.core}, {list(self.surj.values)}]"


def factorize(f: FinMap) -> tuple[MonotoneMap, FinMap]:
    return f.factorize()


def minimal_representative(
    K: FiniteTypeSimplicialSet, sigma: SimplexRef, f: FinMap
) -> SymElement:
    """The minimal representative of the class of (sigma, f)."""
    if f.target_dim != sigma.dim:
        raise SimplicialError(
            f"map {f} does not land in the dimension {sigma.dim} of the simplex"
        )
    inc, surj = f.factorize()
    restricted = K.pullback(sigma, inc)
    combined = restricted.degeneracy.compose(surj)
    return SymElement(
        f.source_dim,
        restricted.core_dim,
        restricted.core,
        FinMap(combined.source_dim, combined.target_dim, combined.values),
    )


class SymmetricSet:
    """S(K) up to ``max_level``, stored as minimal representatives."""

    def __init__(self, K: FiniteTypeSimplicialSet, max_level: int) -> None:
        if max_level > K.max_dim:
            raise SimplicialError(
                f"level {max_level} needs simplices past truncation {K.max_dim}"
            )
        self.K = K
        self.max_level = max_level
        self.levels: list[list[SymElement]] = []
        for n in range(max_level + 1):
            level = []
            for m in range(n + 1):
                surjections = list(fin_surjections(n, m))
                for core in range(K.counts[m]):
                    for s in surjections:
                        level.append(SymElement(n, m, core, s))
            self.levels.append(level)

    def __len__(self) -> int:
        return sum(len(level) for level in self.levels)

    def level(self, n: int) -> list[SymElement]:
        return self.levels[n]

    def act(self, e: SymElement, h: FinMap) -> SymElement:
        """Contravariant action: the class of (core, surj ∘ h)."""
        return act(self.K, e, h)

    def contains(self, e: SymElement) -> bool:
        return (
            e.level <= self.max_level
            and e.core_dim <= e.level
            and e.core < self.K.counts[e.core_dim]
        )

    def to_dict(self) -> dict:
        return {
            "max_level": self.max_level,
            "levels": [
                [[e.core_dim, e.core, list(e.surj.values)] for e in level]
                for level in self.levels
            ],
        }


def symmetrize(K: FiniteTypeSimplicialSet, max_level: int) -> SymmetricSet:
    return SymmetricSet(K, max_level)


def act(K: FiniteTypeSimplicialSet, e: SymElement, h: FinMap) -> SymElement:
    if h.target_dim != e.level:
        raise SimplicialError(f"map {h} does not land in level {e.level}")
    return minimal_representative(K, nondegenerate(e.core_dim, e.core), e.surj.compose(h))


def represented_simplex(K: FiniteTypeSimplicialSet, e: SymElement) -> SimplexRef | None:
    """The simplex tau with [tau, id] = e, if e comes from K itself."""
    if not e.surj.is_monotone():
        return None
    return SimplexRef(e.surj.as_monotone(), e.core)


def _sequences(n_values: int, max_dim: int, accept) -> list[list[tuple[int, ...]]]:
    """Consecutive-distinct sequences over range(n_values) closed under ``accept``.

    ``accept`` must be prefix-closed so that extension can prune.
    """
    levels: list[list[tuple[int, ...]]] = [[(v,) for v in range(n_values) if accept((v,))]]
    for _ in range(max_dim):
        nxt = []
        for seq in levels[-1]:
            for v in range(n_values):
                if v != seq[-1] and accept(seq + (v,)):
                    nxt.append(seq + (v,))
        levels.append(nxt)
    return levels


def build_Cf(f: FinMap, N: int) -> FiniteTypeSimplicialSet:
    """The complex of maps g: <m> -> <n> with f ∘ g weakly increasing, m <= N."""

    def accept(seq: tuple[int, ...]) -> bool:
        vals = [f(v) for v in seq]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    return sequence_complex(N, _sequences(f.source_dim + 1, N, accept))


def sym_slice_complex(
    K: FiniteTypeSimplicialSet, e: SymElement, N: int
) -> FiniteTypeSimplicialSet:
    """Simplicial set of maps g: <m> -> <level> with e·g represented in K.

    Its category of simplices is the slice of Delta/K over e; membership of
    g is "the minimal representative of e·g has a monotone surjection".
    Membership is closed under monotone precomposition, so consecutive-
    distinct sequences describe it.
    """
    cache: dict[tuple[int, ...], bool] = {}

    def member(seq: tuple[int, ...]) -> bool:
        hit = cache.get(seq)
        if hit is None:
            g = FinMap(len(seq) - 1, e.level, seq)
            hit = act(K, e, g).surj.is_monotone()
            cache[seq] = hit
        return hit

    levels: list[list[tuple[int, ...]]] = []
    # membership is not prefix-closed in general, so enumerate each level fully
    from itertools import product

    for d in range(N + 1):
        level = []
        for seq in product(range(e.level + 1), repeat=d + 1):
            if all(a != b for a, b in zip(seq, seq[1:])) and member(seq):
                level.append(seq)
        levels.append(level)
    return sequence_complex(N, levels)
