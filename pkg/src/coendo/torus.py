"""Points of the split maximal torus over F_q and their centralizer data.

A point of T(F_q) is modelled as a residue vector v modulo q-1 in the
X_*(T) basis, standing for the torsion element t = v/(q-1) mod X_*(T).
Root evaluation is then an integer dot product modulo q-1, and every
operation below is exact.  q is always an explicit parameter so that the
same machinery runs over any extension field.
"""

from __future__ import annotations

import math
from functools import cached_property

from . import _kernels, intlinalg as il
from .rootsys import (
    CapExceeded,
    FiniteAbelianGroup,
    GroupDatum,
    SimpleType,
    WeylGroup,
    abelian_from_cyclic,
    build_root_system,
    weyl_order,
)

DEFAULT_POINT_CAP = 1_000_000


class TorusPoint:
    """An element of T(F_q): residues modulo q-1 in the X_* basis."""

    __slots__ = ("q", "residues")

    def __init__(self, q: int, residues):
        self.q = q
        m = q - 1
        self.residues = tuple(x % m for x in residues)

    def __eq__(self, other):
        return (
            isinstance(other, TorusPoint)
            and self.q == other.q
            and self.residues == other.residues
        )

    def __hash__(self):
        return hash((self.q, self.residues))

    def __repr__(self):
        return f"TorusPoint(q={self.q}, {list(self.residues)})"

    def to_record(self):
        return {"q": self.q, "residues": list(self.residues)}


def point_from_index(q: int, rank: int, index: int) -> TorusPoint:
    """Index -> residue vector, last coordinate varying fastest."""
    m = q - 1
    digits = []
    for _ in range(rank):
        digits.append(index % m)
        index //= m
    return TorusPoint(q, tuple(reversed(digits)))


def enumerate_points(datum: GroupDatum, q: int, cap: int = DEFAULT_POINT_CAP):
    """All (q-1)^r points of T(F_q), in deterministic lexicographic order."""
    r = datum.root_system.rank
    total = (q - 1) ** r
    if total > cap:
        raise CapExceeded(f"|T(F_q)| = {total} exceeds cap {cap}", order=total)
    for idx in range(total):
        yield point_from_index(q, r, idx)


class Subsystem:
    """A closed, negation-stable set of roots of a parent root system."""

    def __init__(self, rs, indices):
        self.rs = rs
        self.indices = frozenset(indices)

    @cached_property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))

    @cached_property
    def positive_indices(self) -> tuple[int, ...]:
        return tuple(i for i in self.key if self.rs.roots[i].positive)

    @cached_property
    def rank(self) -> int:
        if not self.indices:
            return 0
        return il.rank([self.rs.roots[i].coeffs for i in self.positive_indices])

    @cached_property
    def base_indices(self) -> tuple[int, ...]:
        """Positive roots of the subsystem not sums of two of its positive roots."""
        pos = self.positive_indices
        coeff_set = {self.rs.roots[i].coeffs for i in pos}
        out = []
        for i in pos:
            ci = self.rs.roots[i].coeffs
            decomposable = False
            for j in pos:
                cj = self.rs.roots[j].coeffs
                rem = tuple(a - b for a, b in zip(ci, cj))
                if any(rem) and rem in coeff_set and sum(rem) > 0:
                    decomposable = True
                    break
            if not decomposable:
                out.append(i)
        return tuple(out)

    def is_closed(self) -> bool:
        """alpha, beta in the set and alpha+beta a root  =>  alpha+beta in the set."""
        have = {self.rs.roots[i].coeffs for i in self.indices}
        for a in have:
            for b in have:
                s = tuple(x + y for x, y in zip(a, b))
                if any(s) and s in self.rs.index_of and s not in have:
                    return False
        negs = {tuple(-x for x in c) for c in have}
        return negs == have

    @cached_property
    def base_cartan(self):
        base = self.base_indices
        roots = self.rs.roots
        return il.mat(
            [
                [
                    sum(
                        roots[i].coeffs[t] * roots[j].coroot_ambient[t]
                        for t in range(self.rs.rank)
                    )
                    for j in base
                ]
                for i in base
            ]
        )

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components of the base, as positions into base_indices."""
        base = self.base_indices
        n = len(base)
        cart = self.base_cartan
        seen = [False] * n
        comps = []
        for start in range(n):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            queue = [start]
            while queue:
                a = queue.pop()
                for b in range(n):
                    if not seen[b] and cart[a][b] != 0:
                        seen[b] = True
                        comp.append(b)
                        queue.append(b)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    @cached_property
    def component_types(self) -> tuple[SimpleType, ...]:
        return tuple(
            identify_cartan([[self.base_cartan[a][b] for b in comp] for a in comp])
            for comp in self.components
        )

    @cached_property
    def signature(self) -> str:
        """Canonical type string, e.g. 'A1xA1xB2'; empty subsystem is '-'."""
        if not self.indices:
            return "-"
        names = sorted(f"{t.family}{t.rank}" for t in self.component_types)
        return "x".join(names)

    @cached_property
    def weyl_order(self) -> int:
        if not self.indices:
            return 1
        return weyl_order(build_root_system(list(self.component_types)))

    def __eq__(self, other):
        return isinstance(other, Subsystem) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"Subsystem({self.signature}, {len(self.indices)} roots)"


def identify_cartan(cartan) -> SimpleType:
    """Identify an irreducible Cartan matrix up to simultaneous permutation."""
    n = len(cartan)
    candidates = []
    for fam in ("A", "B", "C", "D", "E", "F", "G"):
        try:
            candidates.append(SimpleType(fam, n))
        except Exception:
            continue
    for t in candidates:
        ref = t.cartan()
        if _cartan_isomorphic(cartan, ref):
            return t
    raise ValueError(f"unrecognized Cartan matrix {cartan}")


def _cartan_isomorphic(a, b) -> bool:
    """Is a = P b P^-1 for a permutation P?  Backtracking on node images."""
    n = len(a)
    if sorted(sorted(row) for row in a) != sorted(sorted(row) for row in b):
        return False
    assign = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for j in range(n):
            if used[j]:
                continue
            ok = True
            for k in range(i):
                if a[i][k] != b[j][assign[k]] or a[k][i] != b[assign[k]][j]:
                    ok = False
                    break
            if ok and a[i][i] == b[j][j]:
                assign[i] = j
                used[j] = True
                if extend(i + 1):
                    return True
                used[j] = False
                assign[i] = -1
        return False

    return extend(0)


def centralizer_subsystem(datum: GroupDatum, point: TorusPoint) -> Subsystem:
    """Roots alpha with <alpha, v> = 0 mod q-1, i.e. alpha(s) = 1."""
    m = point.q - 1
    funcs = datum.root_functionals
    v = point.residues
    indices = [
        i
        for i, row in enumerate(funcs)
        if sum(a * b for a, b in zip(row, v)) % m == 0
    ]
    return Subsystem(datum.root_system, indices)


def is_elliptic(datum: GroupDatum, point: TorusPoint) -> bool:
    """True iff the centralizer subsystem has full rank."""
    return centralizer_subsystem(datum, point).rank == datum.root_system.rank


def weyl_stabilizer(datum: GroupDatum, weyl: WeylGroup, point: TorusPoint):
    """(W_s, W_s^0) as index tuples: stabilizer of s, and the subgroup
    generated by the reflections of the centralizer subsystem."""
    m = point.q - 1
    v = point.residues
    stab = []
    for i in range(weyl.order):
        w = datum.weyl_matrix_x(weyl, i)
        if all(x % m == 0 for x in il.add(il.matvec(w, v), il.neg(v))):
            stab.append(i)
    sub = centralizer_subsystem(datum, point)
    gens = [
        weyl.index[datum.root_system.reflection_matrix(i)]
        for i in sub.positive_indices
    ]
    refl = weyl.subgroup_closure(gens)
    return tuple(stab), refl


def pi0_order(datum: GroupDatum, weyl: WeylGroup, point: TorusPoint) -> int:
    """|W_s / W_s^0|, the number of components of the full centralizer."""
    ws, ws0 = weyl_stabilizer(datum, weyl, point)
    assert set(ws0) <= set(ws)
    return len(ws) // len(ws0)


def subgroup_points(datum: GroupDatum, q: int, sub: Subsystem) -> FiniteAbelianGroup:
    """The group {t in T(F_q) : alpha(t) = 1 for all alpha in the subsystem}.

    Solved exactly from the congruence system <alpha, v> = 0 mod q-1 by
    Smith reduction; no point enumeration.  Generators are residue vectors.
    """
    m = q - 1
    r = datum.root_system.rank
    base = sub.base_indices
    if not base:
        gens = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        return abelian_from_cyclic(gens, [m] * r, modulus=m)
    funcs = datum.root_functionals
    a = il.mat([funcs[i] for i in base])
    d, _, v = il.snf_transform(a)
    k = len(base)
    gens = []
    orders = []
    for j in range(r):
        dj = abs(d[j][j]) if j < k else 0
        order = math.gcd(dj, m) if dj else m
        if order > 1:
            mult = m // order
            col = tuple(v[i][j] for i in range(r))
            gens.append(tuple((mult * x) % m for x in col))
            orders.append(order)
    return abelian_from_cyclic(gens, orders, modulus=m)


def centralizer_masks_for(datum: GroupDatum, q: int, cap: int = DEFAULT_POINT_CAP,
                          chunk: int = 64):
    """Vanishing masks over the positive roots for every point of T(F_q).

    Returns (masks, positive_root_indices).  Entry idx corresponds to
    ``point_from_index(q, r, idx)``; bit b of a mask is set iff the root
    ``positive_root_indices[b]`` kills that point.  Masks wider than the
    kernel word (or ``chunk``) are assembled from several kernel passes.
    """
    rs = datum.root_system
    m = q - 1
    total = m ** rs.rank
    if total > cap:
        raise CapExceeded(f"|T(F_q)| = {total} exceeds cap {cap}", order=total)
    pos = rs.positive_indices
    funcs = datum.root_functionals
    rows = [funcs[i] for i in pos]
    chunk = min(chunk, 64)
    masks = None
    for lo in range(0, len(rows), chunk):
        part = _kernels.centralizer_masks(rows[lo:lo + chunk], m)
        if masks is None:
            masks = list(part)
        else:
            for idx in range(total):
                masks[idx] |= int(part[idx]) << lo
    return masks, pos
