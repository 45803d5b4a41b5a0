"""Reduced integral homology of truncated simplicial sets.

Chains are the normalized chains (nondegenerate simplices); invariants come
from a Smith normal form computed by sparse unit-pivot elimination followed
by a dense reduction of whatever is left.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .simplicial import FiniteTypeSimplicialSet


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    rank: int
    torsion: tuple[int, ...]
    # False when the next boundary map is past the truncation; the rank is
    # then only an upper bound
    exact: bool = True

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        body = " + ".join(parts) if parts else "0"
        return f"H~{self.degree} = {body}" + ("" if self.exact else " (upper bound)")


def boundary_columns(K: FiniteTypeSimplicialSet, d: int) -> list[dict[int, int]]:
    """Columns of the boundary map C_d -> C_{d-1}; d = 0 is the augmentation."""
    if d == 0:
        return [{0: 1} for _ in range(K.counts[0])]
    cols = []
    for k in range(K.counts[d]):
        col: dict[int, int] = {}
        for i, f in enumerate(K.face_table(d, k)):
            if f.is_degenerate():
                continue
            col[f.core] = col.get(f.core, 0) + (-1) ** i
        cols.append({r: v for r, v in col.items() if v})
    return cols


def smith_invariants(columns: list[dict[int, int]]) -> tuple[int, tuple[int, ...]]:
    """Rank and the invariant factors > 1 of an integer matrix given by columns."""
    cols = {c: dict(col) for c, col in enumerate(columns) if col}
    rows: dict[int, dict[int, int]] = {}
    for c, col in cols.items():
        for r, v in col.items():
            rows.setdefault(r, {})[c] = v
    rank = 0
    while True:
        pivot = None
        for c in sorted(cols, key=lambda c: len(cols[c])):
            for r, v in cols[c].items():
                if v in (1, -1):
                    pivot = (r, c, v)
                    break
            if pivot:
                break
        if pivot is None:
            break
        r, c, p = pivot
        prow = rows[r]
        for r2 in [x for x in cols[c] if x != r]:
            factor = cols[c][r2] * p
            row2 = rows[r2]
            for c2, v in prow.items():
                nv = row2.get(c2, 0) - factor * v
                if nv:
                    row2[c2] = nv
                    cols[c2][r2] = nv
                else:
                    row2.pop(c2, None)
                    cols[c2].pop(r2, None)
            if not row2:
                del rows[r2]
        for c2 in prow:
            cols[c2].pop(r, None)
            if not cols[c2]:
                del cols[c2]
        del rows[r]
        cols.pop(c, None)
        rank += 1
    if not cols:
        return rank, ()
    row_ids = sorted(rows)
    col_ids = sorted(cols)
    dense = [[rows[r].get(c, 0) for c in col_ids] for r in row_ids]
    diag = _dense_smith_diagonal(dense)
    rank += len(diag)
    return rank, tuple(d for d in _invariant_factors(diag) if d > 1)


def _dense_smith_diagonal(a: list[list[int]]) -> list[int]:
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    clean = False
            if clean:
                break
            # move the smallest leftover in row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            _, i, j = min(cand)
            if j == t:
                a[t], a[i] = a[i], a[t]
            else:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def _invariant_factors(diag: list[int]) -> list[int]:
    d = sorted(diag)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                g = gcd(d[i], d[j])
                if g != d[i]:
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d


def reduced_homology(K: FiniteTypeSimplicialSet, max_degree: int) -> list[HomologyGroup]:
    """Reduced homology in degrees -1..max_degree.

    Degree -1 is nonzero only for the empty complex.  Degrees at or above
    ``K.max_dim`` are flagged inexact.
    """
    top = min(max_degree, K.max_dim)
    ranks: dict[int, int] = {}
    torsion: dict[int, tuple[int, ...]] = {}
    for d in range(0, top + 2):
        if d > K.max_dim:
            ranks[d], torsion[d] = 0, ()
            continue
        ranks[d], torsion[d] = smith_invariants(boundary_columns(K, d))
    sizes = {-1: 1}
    sizes.update({d: K.counts[d] for d in range(0, top + 1)})
    out = [HomologyGroup(-1, 1 - ranks[0], ())]
    for k in range(0, top + 1):
        rk = sizes[k] - ranks[k] - ranks[k + 1]
        out.append(HomologyGroup(k, rk, torsion[k + 1], exact=k + 1 <= K.max_dim))
    return out


def homology(K: FiniteTypeSimplicialSet, max_degree: int) -> list[HomologyGroup]:
    return reduced_homology(K, max_degree)


def first_nonzero(groups: list[HomologyGroup], exact_only: bool = True) -> HomologyGroup | None:
    for g in groups:
        if exact_only and not g.exact:
            continue
        if not g.is_zero():
            return g
    return None
