"""Maps between standard finite sets <n> = {0, ..., n}.

``FinMap`` is an arbitrary map (a morphism of Fin); ``MonotoneMap`` is the
weakly increasing special case (a morphism of the simplex category).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Sequence


@dataclass(frozen=True, eq=False)
class FinMap:
    source_dim: int
    target_dim: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.source_dim < 0 or self.target_dim < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.values) != self.source_dim + 1:
            raise ValueError(
                f"expected {self.source_dim + 1} values, got {len(self.values)}"
            )
        for v in self.values:
            if not 0 <= v <= self.target_dim:
                raise ValueError(f"value {v} outside <{self.target_dim}>")

    @classmethod
    def of(cls, values: Sequence[int], target_dim: int | None = None) -> "FinMap":
        values = tuple(values)
        if target_dim is None:
            target_dim = max(values)
        return cls(len(values) - 1, target_dim, values)

    # monotone maps compare equal to the same plain map
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinMap):
            return NotImplemented
        return (self.source_dim, self.target_dim, self.values) == (
            other.source_dim,
            other.target_dim,
            other.values,
        )

    def __hash__(self) -> int:
        return hash((self.source_dim, self.target_dim, self.values))

    def __call__(self, i: int) -> int:
        return self.values[i]

    def __str__(self) -> str:
        return f"<{self.source_dim}>->{self.target_dim}{list(self.values)}"

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.values)))

    def is_surjective(self) -> bool:
        return len(set(self.values)) == self.target_dim + 1

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def compose(self, other: "FinMap") -> "FinMap":
        """Return ``self ∘ other`` (apply ``other`` first)."""
        if other.target_dim != self.source_dim:
            raise ValueError(f"cannot compose {self} after {other}")
        values = tuple(self.values[v] for v in other.values)
        if isinstance(self, MonotoneMap) and isinstance(other, MonotoneMap):
            return MonotoneMap(other.source_dim, self.target_dim, values)
        return FinMap(other.source_dim, self.target_dim, values)

    def image_of(self, subset_mask: int) -> int:
        """Image of a subset of <source_dim>, both encoded as bitmasks."""
        out = 0
        for i, v in enumerate(self.values):
            if subset_mask >> i & 1:
                out |= 1 << v
        return out

    def as_monotone(self) -> "MonotoneMap":
        return MonotoneMap(self.source_dim, self.target_dim, self.values)

    def factorize(self) -> tuple["MonotoneMap", "FinMap"]:
        """Unique factorization ``self = inc ∘ surj``.

        ``inc`` is strictly increasing onto the image, ``surj`` is surjective.
        """
        image = self.image
        position = {v: k for k, v in enumerate(image)}
        inc = MonotoneMap(len(image) - 1, self.target_dim, image)
        surj_values = tuple(position[v] for v in self.values)
        if isinstance(self, MonotoneMap):
            surj: FinMap = MonotoneMap(self.source_dim, len(image) - 1, surj_values)
        else:
            surj = FinMap(self.source_dim, len(image) - 1, surj_values)
        return inc, surj


@dataclass(frozen=True, eq=False)
class MonotoneMap(FinMap):
    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_monotone():
            raise ValueError(f"{list(self.values)} is not weakly increasing")

    @classmethod
    def of(cls, values: Sequence[int], target_dim: int | None = None) -> "MonotoneMap":
        values = tuple(values)
        if target_dim is None:
            target_dim = max(values)
        return cls(len(values) - 1, target_dim, values)

    @classmethod
    def identity(cls, n: int) -> "MonotoneMap":
        return _identity(n)

    @classmethod
    def coface(cls, n: int, i: int) -> "MonotoneMap":
        """The injection [n-1] -> [n] that skips ``i``."""
        return _coface(n, i)

    @classmethod
    def codegeneracy(cls, n: int, j: int) -> "MonotoneMap":
        """The surjection [n+1] -> [n] that hits ``j`` twice."""
        return _codegeneracy(n, j)

    @classmethod
    def inclusion(cls, n: int, subset_mask: int) -> "MonotoneMap":
        """The increasing map with image the given nonempty subset of [n]."""
        return _inclusion(n, subset_mask)


@lru_cache(maxsize=None)
def _identity(n: int) -> MonotoneMap:
    return MonotoneMap(n, n, tuple(range(n + 1)))


@lru_cache(maxsize=None)
def _coface(n: int, i: int) -> MonotoneMap:
    if not 0 <= i <= n or n < 1:
        raise ValueError(f"no coface d^{i} into [{n}]")
    return MonotoneMap(n - 1, n, tuple(k if k < i else k + 1 for k in range(n)))


@lru_cache(maxsize=None)
def _codegeneracy(n: int, j: int) -> MonotoneMap:
    if not 0 <= j <= n:
        raise ValueError(f"no codegeneracy s^{j} onto [{n}]")
    return MonotoneMap(n + 1, n, tuple(k if k <= j else k - 1 for k in range(n + 2)))


@lru_cache(maxsize=None)
def _inclusion(n: int, subset_mask: int) -> MonotoneMap:
    elems = tuple(i for i in range(n + 1) if subset_mask >> i & 1)
    if not elems or subset_mask >> (n + 1):
        raise ValueError(f"bad subset mask {subset_mask:b} of [{n}]")
    return MonotoneMap(len(elems) - 1, n, elems)


@lru_cache(maxsize=None)
def monotone_surjections(n: int, k: int) -> tuple[MonotoneMap, ...]:
    """All weakly increasing surjections [n] -> [k], lexicographically ordered."""
    if k > n or k < 0:
        return ()
    out = []
    # a surjection is fixed by the k positions where the value steps up
    for steps in combinations(range(1, n + 1), k):
        values, v = [], 0
        for pos in range(n + 1):
            if pos in steps:
                v += 1
            values.append(v)
        out.append(MonotoneMap(n, k, tuple(values)))
    return tuple(sorted(out, key=lambda m: m.values))


@lru_cache(maxsize=None)
def monotone_maps(n: int, m: int) -> tuple[MonotoneMap, ...]:
    """All weakly increasing maps [n] -> [m]."""
    out = []
    for values in product(range(m + 1), repeat=n + 1):
        if all(a <= b for a, b in zip(values, values[1:])):
            out.append(MonotoneMap(n, m, values))
    return tuple(out)


def fin_maps(n: int, m: int) -> Iterator[FinMap]:
    """All maps <n> -> <m>."""
    for values in product(range(m + 1), repeat=n + 1):
        yield FinMap(n, m, values)


def fin_surjections(n: int, m: int) -> Iterator[FinMap]:
    for f in fin_maps(n, m):
        if f.is_surjective():
            yield f


def collapse_runs(seq: Sequence) -> tuple[tuple, MonotoneMap]:
    """Split a sequence into (consecutive-distinct core, run surjection).

    ``seq[k] == core[surj(k)]`` for all positions ``k``.
    """
    core: list = []
    idx: list[int] = []
    for x in seq:
        if not core or core[-1] != x:
            core.append(x)
        idx.append(len(core) - 1)
    return tuple(core), MonotoneMap(len(seq) - 1, len(core) - 1, tuple(idx))
