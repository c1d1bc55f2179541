"""Root systems, Weyl groups and lattices with exact integer arithmetic.

Coordinates
-----------
The ambient space is X_*(T) tensor Q with the *fundamental coweight* basis
of the (product) root system.  In these coordinates:

* a root alpha = sum c_i alpha_i is the integer functional row ``c``, and
  the pairing <alpha, x> is the plain dot product c . x;
* the simple coroot alpha_j^vee is column j of the Cartan matrix, so the
  coroot lattice has basis matrix C and the coweight lattice the identity;
* every lattice between them (any cocharacter lattice of a semisimple
  group) has an integer basis matrix.

All structures are immutable after construction; the functions here are
pure and safe for concurrent use.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

from . import _kernels, intlinalg as il
from .intlinalg import Matrix, Vector

DEFAULT_WEYL_CAP = 1_000_000

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")


class IllegalType(ValueError):
    """Not a legal Dynkin type."""


class CapExceeded(RuntimeError):
    """Enumeration would exceed the configured cap.

    ``order`` carries the exact group order computed from the degrees, so
    callers can fall back to order-only paths.
    """

    def __init__(self, message: str, order: int | None = None):
        super().__init__(message)
        self.order = order


class NotASublattice(ValueError):
    pass


class NotFullRank(ValueError):
    pass


class BadCharacteristic(ValueError):
    pass


class SimpleType:
    """A simple Dynkin type, e.g. B3 (validity: B needs rank >= 2, etc.)."""

    _MIN_RANK = {"A": 1, "B": 2, "C": 3, "D": 4, "F": 4, "G": 2}

    def __init__(self, family: str, rank: int):
        family = family.upper()
        if family not in FAMILIES:
            raise IllegalType(f"unknown family {family!r}")
        if family == "E":
            if rank not in (6, 7, 8):
                raise IllegalType(f"E{rank} is not a legal type")
        elif family in ("F", "G"):
            if rank != self._MIN_RANK[family]:
                raise IllegalType(f"{family}{rank} is not a legal type")
        elif rank < self._MIN_RANK[family]:
            raise IllegalType(f"{family}{rank} is not a legal type")
        self.family = family
        self.rank = rank

    @classmethod
    def parse(cls, text: str) -> "SimpleType":
        text = text.strip()
        if len(text) < 2 or not text[1:].isdigit():
            raise IllegalType(f"cannot parse type {text!r}")
        return cls(text[0], int(text[1:]))

    def cartan(self) -> Matrix:
        """Cartan matrix C with C[i][j] = <alpha_i, alpha_j^vee> (Bourbaki)."""
        r = self.rank
        c = [[2 * (i == j) for j in range(r)] for i in range(r)]

        def link(i, j, cij=-1, cji=-1):
            c[i][j] = cij
            c[j][i] = cji

        fam = self.family
        if fam in ("A", "B", "C"):
            for i in range(r - 1):
                link(i, i + 1)
            if fam == "B":
                link(r - 2, r - 1, -2, -1)
            elif fam == "C":
                link(r - 2, r - 1, -1, -2)
        elif fam == "D":
            for i in range(r - 3):
                link(i, i + 1)
            link(r - 3, r - 2)
            link(r - 3, r - 1)
        elif fam == "E":
            # Bourbaki: chain 1-3-4-5-..., node 2 hangs off node 4
            chain = [0] + list(range(2, r))
            for a, b in zip(chain, chain[1:]):
                link(a, b)
            link(1, 3)
        elif fam == "F":
            link(0, 1)
            link(1, 2, -2, -1)
            link(2, 3)
        elif fam == "G":
            link(0, 1, -1, -3)
        return il.mat(c)

    def __repr__(self):
        return f"{self.family}{self.rank}"

    def __eq__(self, other):
        return (
            isinstance(other, SimpleType)
            and (self.family, self.rank) == (other.family, other.rank)
        )

    def __hash__(self):
        return hash((self.family, self.rank))


class Root:
    """A root with its coroot, in simple-root / simple-coroot coefficients."""

    __slots__ = ("coeffs", "coroot", "factor", "height", "index", "coroot_ambient")

    def __init__(self, coeffs: Vector, coroot: Vector, factor: int, index: int,
                 coroot_ambient: Vector):
        self.coeffs = coeffs
        self.coroot = coroot
        self.factor = factor
        self.height = sum(coeffs)
        self.index = index
        self.coroot_ambient = coroot_ambient

    @property
    def positive(self) -> bool:
        return self.height > 0

    def __repr__(self):
        return f"Root{self.coeffs}"


def _factor_closure(cartan: Matrix) -> list[tuple[Vector, Vector]]:
    """Reflection closure of the simple (root, coroot) pairs."""
    r = len(cartan)
    simple = [(tuple(int(i == t) for t in range(r)),) * 2 for i in range(r)]
    seen = {p[0]: p[1] for p in simple}
    frontier = list(simple)
    while frontier:
        new = []
        for c, k in frontier:
            for j in range(r):
                pair_cj = sum(c[i] * cartan[i][j] for i in range(r))
                nc = tuple(ci - pair_cj * (i == j) for i, ci in enumerate(c))
                if nc not in seen:
                    pair_jk = sum(cartan[j][i] * k[i] for i in range(r))
                    nk = tuple(ki - pair_jk * (i == j) for i, ki in enumerate(k))
                    seen[nc] = nk
                    new.append((nc, nk))
        frontier = new
    return sorted(seen.items(), key=lambda p: (sum(p[0]), p[0]))


class RootSystem:
    """Product of simple root systems; see module docstring for coordinates."""

    def __init__(self, factors: list[SimpleType]):
        if not factors:
            raise IllegalType("empty factor list")
        self.simple_factors = tuple(factors)
        self.rank = sum(t.rank for t in factors)
        blocks = [t.cartan() for t in factors]
        r = self.rank
        cart = [[0] * r for _ in range(r)]
        offsets = []
        off = 0
        for t, blk in zip(factors, blocks):
            offsets.append(off)
            for i in range(t.rank):
                for j in range(t.rank):
                    cart[off + i][off + j] = blk[i][j]
            off += t.rank
        self.cartan = il.mat(cart)
        self.factor_offsets = tuple(offsets)

        roots: list[Root] = []
        for fi, (t, blk) in enumerate(zip(factors, blocks)):
            off = offsets[fi]
            for c, k in _factor_closure(blk):
                cc = [0] * r
                kk = [0] * r
                cc[off:off + t.rank] = c
                kk[off:off + t.rank] = k
                roots.append(Root(tuple(cc), tuple(kk), fi, -1, ()))
        roots.sort(key=lambda rt: (rt.height, rt.coeffs))
        for i, rt in enumerate(roots):
            rt.index = i
            rt.coroot_ambient = il.matvec(self.cartan, rt.coroot)
        self.roots = tuple(roots)
        self.index_of = {rt.coeffs: rt.index for rt in roots}
        self._coroot_index = {rt.coroot_ambient: rt.index for rt in roots}
        self.positive_indices = tuple(rt.index for rt in roots if rt.positive)
        self.negate = tuple(
            self.index_of[tuple(-x for x in rt.coeffs)] for rt in roots
        )

    @property
    def num_roots(self) -> int:
        return len(self.roots)

    @property
    def dim_g(self) -> int:
        return len(self.roots) + self.rank

    def factor_nodes(self, factor_index: int) -> range:
        off = self.factor_offsets[factor_index]
        return range(off, off + self.simple_factors[factor_index].rank)

    def pairing(self, root_index: int, vector: Vector):
        """<alpha, x> for x in ambient coordinates."""
        c = self.roots[root_index].coeffs
        return sum(a * b for a, b in zip(c, vector))

    def reflection_matrix(self, root_index: int) -> Matrix:
        """Ambient matrix of the reflection in the given root."""
        rt = self.roots[root_index]
        d = rt.coroot_ambient
        c = rt.coeffs
        r = self.rank
        return il.mat(
            [[(i == j) - d[i] * c[j] for j in range(r)] for i in range(r)]
        )

    def __repr__(self):
        return "x".join(map(repr, self.simple_factors))


def build_root_system(factors) -> RootSystem:
    """Construct the root system of a product of simple types."""
    parsed = [t if isinstance(t, SimpleType) else SimpleType.parse(t) for t in factors]
    return RootSystem(parsed)


def highest_root_coefficients(rs: RootSystem, factor_index: int) -> Vector:
    """Coefficients of the highest root of an irreducible factor on its nodes."""
    nodes = rs.factor_nodes(factor_index)
    best = max(
        (rt for rt in rs.roots if rt.factor == factor_index), key=lambda rt: rt.height
    )
    return tuple(best.coeffs[i] for i in nodes)


def exponents(rs: RootSystem, factor_index: int) -> tuple[int, ...]:
    """Exponents of an irreducible factor, from the height distribution.

    The positive-root height histogram is the conjugate of the partition
    formed by the exponents; sum m_i = half the number of roots.
    """
    heights = [rt.height for rt in rs.roots if rt.factor == factor_index and rt.positive]
    hist = {}
    for h in heights:
        hist[h] = hist.get(h, 0) + 1
    out = []
    level = 1
    while any(v >= level for v in hist.values()):
        out.append(sum(1 for h, v in hist.items() if v >= level))
        level += 1
    out.sort()
    return tuple(out)


def weyl_order(rs: RootSystem) -> int:
    """|W| as the product over factors of prod(m_i + 1)."""
    order = 1
    for fi in range(len(rs.simple_factors)):
        for m in exponents(rs, fi):
            order *= m + 1
    return order


class WeylGroup:
    """A fully enumerated Weyl group acting on the ambient coweight space."""

    def __init__(self, rs: RootSystem, elements: list[Matrix]):
        self.rs = rs
        self.elements = tuple(elements)
        self.index = {m: i for i, m in enumerate(elements)}
        self.order = len(elements)
        self._perms: dict[int, tuple[int, ...]] = {}
        self._inv: dict[int, int] = {}

    def mul(self, i: int, j: int) -> int:
        return self.index[il.matmul(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        cached = self._inv.get(i)
        if cached is None:
            cached = self.index[il.int_inverse(self.elements[i])]
            self._inv[i] = cached
        return cached

    def root_perm(self, i: int) -> tuple[int, ...]:
        """Index permutation of the roots under element i (via coroots)."""
        cached = self._perms.get(i)
        if cached is None:
            m = self.elements[i]
            out = tuple(
                self.rs._coroot_index[il.matvec(m, rt.coroot_ambient)]
                for rt in self.rs.roots
            )
            self._perms[i] = out
            cached = out
        return cached

    def length(self, i: int) -> int:
        perm = self.root_perm(i)
        pos = set(self.rs.positive_indices)
        return sum(1 for j in self.rs.positive_indices if perm[j] not in pos)

    def subgroup_closure(self, generators) -> tuple[int, ...]:
        """Closure of the given element indices, as a sorted index tuple."""
        seen = {0}
        frontier = [0]
        while frontier:
            new = []
            for a in frontier:
                for g in generators:
                    p = self.mul(g, a)
                    if p not in seen:
                        seen.add(p)
                        new.append(p)
            frontier = new
        return tuple(sorted(seen))

    def cosets(self, subgroup) -> list[tuple[int, tuple[int, ...]]]:
        """Right cosets H\\W as (canonical representative, members) pairs.

        The representative is the member of minimal length (ties broken by
        element index); pairs are listed by representative index.
        """
        sub = list(subgroup)
        seen = [False] * self.order
        out = []
        for w in range(self.order):
            if seen[w]:
                continue
            members = sorted({self.mul(h, w) for h in sub})
            for x in members:
                seen[x] = True
            rep = min(members, key=lambda x: (self.length(x), x))
            out.append((rep, tuple(members)))
        out.sort(key=lambda pair: pair[0])
        return out


def weyl_generate(rs: RootSystem, cap: int = DEFAULT_WEYL_CAP) -> WeylGroup:
    """Enumerate W by closure of the simple reflections, identity first."""
    order = weyl_order(rs)
    if order > cap:
        raise CapExceeded(f"|W| = {order} exceeds cap {cap}", order=order)
    r = rs.rank
    gens = []
    for j in range(r):
        m = [[int(i == t) for t in range(r)] for i in range(r)]
        for i in range(r):
            m[i][j] -= rs.cartan[i][j]
        gens.append(tuple(x for row in m for x in row))
    flat = _kernels.weyl_closure(gens, r, cap)
    elements = [
        il.mat([f[i * r:(i + 1) * r] for i in range(r)]) for f in flat
    ]
    group = WeylGroup(rs, elements)
    if group.order != order:
        raise AssertionError(
            f"enumerated order {group.order} != degree product {order}"
        )
    return group


class Lattice:
    """Full-rank lattice in the ambient space, integer basis matrix columns."""

    def __init__(self, name: str, basis: Matrix):
        self.name = name
        self.basis = il.mat(basis)
        if il.det(self.basis) == 0:
            raise ValueError("lattice basis is singular")

    @cached_property
    def basis_inverse(self):
        return il.inverse(self.basis)

    def coordinates(self, vector) -> tuple[Fraction, ...]:
        """Coordinates of an ambient vector in this lattice's basis."""
        inv = self.basis_inverse
        return tuple(
            sum(row[j] * Fraction(vector[j]) for j in range(len(vector)))
            for row in inv
        )

    def contains(self, vector) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(vector))

    def __repr__(self):
        return f"Lattice({self.name})"


def coroot_lattice(rs: RootSystem) -> Lattice:
    return Lattice("coroot", rs.cartan)


def coweight_lattice(rs: RootSystem) -> Lattice:
    return Lattice("coweight", il.identity(rs.rank))


class FiniteAbelianGroup:
    """Invariant factors d_1 | d_2 | ... (each > 1) with matching generators."""

    def __init__(self, invariants, generators):
        self.invariants = tuple(int(d) for d in invariants)
        self.generators = tuple(tuple(g) for g in generators)
        for a, b in zip(self.invariants, self.invariants[1:]):
            if b % a:
                raise ValueError("invariant factors must form a divisibility chain")
        if any(d <= 1 for d in self.invariants):
            raise ValueError("invariant factors must exceed 1")
        order = 1
        for d in self.invariants:
            order *= d
        self.order = order

    def __repr__(self):
        if not self.invariants:
            return "FiniteAbelianGroup(trivial)"
        return "FiniteAbelianGroup(%s)" % " x ".join(
            f"Z/{d}" for d in self.invariants
        )

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAbelianGroup)
            and self.invariants == other.invariants
        )

    def __hash__(self):
        return hash(self.invariants)


def abelian_from_cyclic(generators, orders, modulus=None) -> FiniteAbelianGroup:
    """Canonicalize independent cyclic generators into invariant-factor form."""
    pairs = [(g, o) for g, o in zip(generators, orders) if o > 1]
    if not pairs:
        return FiniteAbelianGroup((), ())
    gens = [p[0] for p in pairs]
    rel = il.mat([[pairs[i][1] * (i == j) for j in range(len(pairs))]
                  for i in range(len(pairs))])
    d, u, _ = il.snf_transform(rel)
    uinv = il.int_inverse(u)
    new_gens = []
    new_orders = []
    for j in range(len(pairs)):
        order = abs(d[j][j])
        if order <= 1:
            continue
        g = tuple(
            sum(gens[i][t] * uinv[i][j] for i in range(len(pairs)))
            for t in range(len(gens[0]))
        )
        if modulus is not None:
            g = tuple(x % modulus for x in g)
        new_gens.append(g)
        new_orders.append(order)
    combined = sorted(zip(new_orders, new_gens))
    return FiniteAbelianGroup(
        [o for o, _ in combined], [g for _, g in combined]
    )


def lattice_quotient(big: Lattice, small: Lattice) -> FiniteAbelianGroup:
    """big/small via the Smith normal form of the inclusion matrix."""
    n = len(big.basis)
    coords = [big.coordinates(col) for col in il.columns(small.basis)]
    if any(c.denominator != 1 for col in coords for c in col):
        raise NotASublattice(f"{small.name} is not contained in {big.name}")
    m = il.mat([[int(coords[j][i]) for j in range(n)] for i in range(n)])
    d, u, _ = il.snf_transform(m)
    uinv = il.int_inverse(u)
    new_basis = il.matmul(big.basis, uinv)
    invariants = []
    generators = []
    for j in range(n):
        dj = abs(d[j][j])
        if dj > 1:
            invariants.append(dj)
            generators.append(tuple(row[j] for row in new_basis))
    return FiniteAbelianGroup(invariants, generators)


class VeryGoodVerdict:
    def __init__(self, ok: bool, reasons: list[str]):
        self.ok = ok
        self.reasons = tuple(reasons)

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"VeryGoodVerdict({self.ok}, {list(self.reasons)})"


def very_good_check(p: int, factors) -> VeryGoodVerdict:
    """Whether p is a very good characteristic for every simple factor."""
    reasons = []
    for t in factors:
        if t.family == "A":
            if (t.rank + 1) % p == 0:
                reasons.append(f"{t}: p | n for A_(n-1) with n = {t.rank + 1}")
        elif t.family in ("B", "C", "D"):
            if p == 2:
                reasons.append(f"{t}: p = 2 for type {t.family}")
        elif t.family == "E" and t.rank == 8:
            if p in (2, 3, 5):
                reasons.append(f"{t}: p in {{2,3,5}} for E8")
        else:
            if p in (2, 3):
                reasons.append(f"{t}: p in {{2,3}} for type {t.family}{t.rank}")
    return VeryGoodVerdict(not reasons, reasons)


class GroupDatum:
    """Split semisimple group: root system + cocharacter lattice + char p."""

    def __init__(self, root_system: RootSystem, cochar: Lattice, p: int):
        self.root_system = root_system
        self.cochar = cochar
        self.p = p
        rs = root_system
        if not all(cochar.contains(col) for col in il.columns(rs.cartan)):
            raise NotASublattice("coroot lattice not contained in X_*")
        if any(
            any(x.denominator != 1 for x in Lattice("cw", il.identity(rs.rank))
                .coordinates(col))
            for col in il.columns(cochar.basis)
        ):
            raise NotASublattice("X_* not contained in the coweight lattice")
        verdict = very_good_check(p, rs.simple_factors)
        if not verdict:
            raise BadCharacteristic("; ".join(verdict.reasons))

    @cached_property
    def root_functionals(self) -> tuple[Vector, ...]:
        """Every root as an integer functional on X_* coordinates."""
        b = self.cochar.basis
        return tuple(il.vecmat(rt.coeffs, b) for rt in self.root_system.roots)

    @cached_property
    def weyl_on_cochar(self) -> dict:
        return {}

    def weyl_matrix_x(self, weyl: WeylGroup, i: int) -> Matrix:
        """Matrix of element i in the X_* basis (integer)."""
        cached = self.weyl_on_cochar.get(i)
        if cached is None:
            b = self.cochar.basis
            m = il.matmul(weyl.elements[i], b)
            binv = self.cochar.basis_inverse
            rows = [
                [sum(binv[a][t] * m[t][c] for t in range(len(b))) for c in range(len(b))]
                for a in range(len(b))
            ]
            cached = il.mat([[int(x) for x in row] for row in rows])
            self.weyl_on_cochar[i] = cached
        return cached

    def __repr__(self):
        return f"GroupDatum({self.root_system!r}, {self.cochar.name}, p={self.p})"


def characteristic_of(q: int) -> int:
    """The prime p with q = p^e; rejects non prime powers."""
    for p in range(2, q + 1):
        if q % p == 0:
            n = q
            while n % p == 0:
                n //= p
            if n != 1:
                raise ValueError(f"{q} is not a prime power")
            return p
    raise ValueError(f"{q} is not a prime power")


def make_datum(factors, lattice="sc", p: int = 5) -> GroupDatum:
    """Build a GroupDatum; lattice is "sc", "ad" or an explicit basis matrix."""
    rs = build_root_system(factors)
    if lattice == "sc":
        lat = Lattice("sc", rs.cartan)
    elif lattice == "ad":
        lat = Lattice("ad", il.identity(rs.rank))
    else:
        lat = Lattice("custom", il.mat(lattice))
    return GroupDatum(rs, lat, p)


def pi1_order(datum: GroupDatum) -> int:
    """|X_*/(coroot lattice)| = order of the fundamental group."""
    q = lattice_quotient(datum.cochar, coroot_lattice(datum.root_system))
    return q.order


def subsystem_base_functionals(datum: GroupDatum, base_indices) -> Matrix:
    """Rows: the base roots of a subsystem as functionals on X_*."""
    funcs = datum.root_functionals
    return il.mat([funcs[i] for i in base_indices])


def geometric_center_order(datum: GroupDatum, sub) -> int:
    """Order of the geometric center of the subgroup with the given roots.

    ``sub`` is a subsystem (anything with ``base_indices``) or a raw base
    index sequence.  The order is the index of X_* in the coweight lattice
    of the subsystem; the base must span the whole space (elliptic case).
    """
    base_indices = getattr(sub, "base_indices", sub)
    a = subsystem_base_functionals(datum, base_indices)
    if len(a) != datum.root_system.rank or il.det(a) == 0:
        raise NotFullRank("subsystem base does not span the ambient space")
    return abs(int(il.det(a)))
