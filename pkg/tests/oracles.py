"""Independent brute-force oracles used by the tests.

None of these call the normal-form, solver or enumeration code they check;
they work from face tables and the simplicial identities directly.
"""

from __future__ import annotations

from itertools import product

from hyperdescent.maps import MonotoneMap
from hyperdescent.simplicial import FiniteTypeSimplicialSet, SimplexRef

# -- simplicial identities by rewriting --------------------------------------
#
# A simplex is (s_word, core_dim, core) meaning s_{j1} s_{j2} ... s_{jk} y with
# j1 > j2 > ... > jk (the last operator is applied first).


def _sort_degeneracies(word: list[int]) -> list[int]:
    """Rewrite with s_i s_j = s_{j+1} s_i (i <= j) until strictly decreasing."""
    word = list(word)
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            i, j = word[k], word[k + 1]
            if i <= j:
                word[k], word[k + 1] = j + 1, i
                changed = True
    return word


def _surjection_to_word(values: tuple[int, ...]) -> list[int]:
    """Degeneracy operators whose composite pulls back along ``values``."""
    word = []
    # repeated positions: values[p] == values[p+1] means s_p was applied
    for p in range(len(values) - 1):
        if values[p] == values[p + 1]:
            word.append(p)
    # applied lowest index first, so written highest first
    return sorted(word, reverse=True)


def _word_to_surjection(word: list[int], core_dim: int) -> tuple[int, ...]:
    values = list(range(core_dim + 1))
    for j in reversed(word):
        # s_j on an n-simplex pulls back along the codegeneracy [n+1] -> [n]
        sig = [t if t <= j else t - 1 for t in range(len(values) + 1)]
        values = [values[s] for s in sig]
    return tuple(values)


def rewrite_apply(K: FiniteTypeSimplicialSet, simplex: tuple, op: tuple[str, int]) -> tuple:
    word, d, core = simplex
    kind, i = op
    if kind == "s":
        return _sort_degeneracies([i] + list(word)), d, core
    # push d_i through the degeneracies from the outside in
    out_prefix: list[int] = []
    rest = list(word)
    while rest:
        j = rest.pop(0)
        if i < j:
            out_prefix.append(j - 1)
        elif i in (j, j + 1):
            return _sort_degeneracies(out_prefix + rest), d, core
        else:
            out_prefix.append(j)
            i -= 1
    face = K.face_table(d, core)[i]
    inner = _surjection_to_word(face.degeneracy.values)
    return _sort_degeneracies(out_prefix + inner), face.core_dim, face.core


def rewrite_evaluate(K: FiniteTypeSimplicialSet, start: SimplexRef, ops) -> SimplexRef:
    simplex = (_surjection_to_word(start.degeneracy.values), start.core_dim, start.core)
    for op in ops:
        simplex = rewrite_apply(K, simplex, op)
    word, d, core = simplex
    values = _word_to_surjection(word, d)
    return SimplexRef(MonotoneMap(len(values) - 1, d, values), core)


def op_as_map(op: tuple[str, int], dim: int) -> MonotoneMap:
    kind, i = op
    if kind == "d":
        return MonotoneMap.coface(dim, i)
    return MonotoneMap.codegeneracy(dim, i)


# -- spheres ---------------------------------------------------------------------


def brute_spheres(K: FiniteTypeSimplicialSet, n: int) -> set[tuple]:
    simplices = K.all_simplices(n - 1)
    out = set()
    for facets in product(simplices, repeat=n + 1):
        if n == 1 or all(
            K.face(facets[j], i) == K.face(facets[i], j - 1)
            for j in range(n + 1)
            for i in range(j)
        ):
            out.add(facets)
    return out


# -- symmetrization by relation closure ------------------------------------------


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def closure_classes(K: FiniteTypeSimplicialSet, n: int, max_m: int) -> list[list[tuple]]:
    """Classes of pairs (simplex, map values) with the simplex in K_m, m <= max_m,
    under (tau, g f) ~ (g^* tau, f) for g a coface or codegeneracy."""
    uf = _UnionFind()
    pairs = []
    for m in range(max_m + 1):
        simplices = K.all_simplices(m)
        for tau in simplices:
            for f in product(range(m + 1), repeat=n + 1):
                pairs.append((tau, f))
                uf.find((tau, f))
    for m in range(max_m + 1):
        for tau in K.all_simplices(m):
            gens = [MonotoneMap.coface(m, i) for i in range(m + 1)] if m >= 1 else []
            if m + 1 <= max_m:
                gens += [MonotoneMap.codegeneracy(m, j) for j in range(m + 1)]
            for g in gens:
                mp = g.source_dim
                pulled = K.pullback(tau, g)
                for f in product(range(mp + 1), repeat=n + 1):
                    gf = tuple(g.values[v] for v in f)
                    uf.union((tau, gf), (pulled, f))
    classes: dict = {}
    for p in pairs:
        classes.setdefault(uf.find(p), []).append(p)
    return list(classes.values())


# -- limits over the truncated category of simplices ---------------------------------


def brute_hypercover_limit(F, H, top: int = 3) -> set[tuple]:
    """Families over every simplex up to dimension ``top`` (degenerate ones
    included), compatible along every face and degeneracy, projected to
    (vertex components, nondegenerate edge components)."""
    K = H.spine
    top = min(top, K.max_dim)
    objects = [x for n in range(top + 1) for x in K.all_simplices(n)]
    pos = {x: k for k, x in enumerate(objects)}
    checks: list[list[tuple[int, tuple]]] = [[] for _ in objects]
    for x in objects:
        n = x.dim
        if n == 0:
            continue
        ops = [MonotoneMap.coface(n, i) for i in range(n + 1)]
        for theta in ops:
            y = K.pullback(x, theta)
            # the component at x is the restriction of the one at its face y
            checks[pos[x]].append((pos[y], F.res(H.open_of(y), H.open_of(x))))
        if n + 1 <= top:
            for j in range(n + 1):
                z = K.pullback(x, MonotoneMap.codegeneracy(n, j))
                checks[pos[z]].append((pos[x], F.res(H.open_of(x), H.open_of(z))))
    sizes = [F.size(H.open_of(x)) for x in objects]
    out = []
    # iterative depth-first search: values[k] is the next candidate at depth k
    values = [-1] * len(objects)
    k = 0
    while k >= 0:
        values[k] += 1
        if values[k] >= sizes[k]:
            values[k] = -1
            k -= 1
            continue
        v = values[k]
        if all(table[values[src]] == v for src, table in checks[k]):
            if k == len(objects) - 1:
                out.append(tuple(values))
            else:
                k += 1
    keep = [pos[v] for v in K.nondegenerate(0)] + [pos[e] for e in K.nondegenerate(1)]
    return {tuple(fam[k] for k in keep) for fam in out}


def brute_poset_limit(F, opens) -> set[tuple]:
    opens = sorted(opens, key=lambda m: (bin(m).count("1"), m))
    out = set()
    for fam in product(*[range(F.size(U)) for U in opens]):
        if all(
            F.res(U, V)[fam[a]] == fam[b]
            for a, U in enumerate(opens)
            for b, V in enumerate(opens)
            if V & ~U == 0
        ):
            out.add(fam)
    return out
