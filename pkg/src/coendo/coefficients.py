"""Integer multiplicity coefficients from per-place character data.

Each place v carries an algebraic character lambda_v in X^*(T); on a
torsion point t = v/(q-1) the character evaluates through the canonical
residue pairing as the exponent <lambda, v> mod q-1 of a fixed primitive
(q-1)-th root of unity.  Sums of character values over a stratum are
computed exactly by Möbius inversion over the strata poset plus character
orthogonality on the finite groups Z_i(F_q): no floating point and no
cyclotomic reduction anywhere on this route.

Sign convention: by default every place is evaluated at the inverse point
(``uniform-inverse``), which is the unique reading for which the minimal
stratum coefficient equals |Z_G(F_q)| whenever the product of the place
characters is trivial on the center.  The alternative that evaluates the
infinity place at the point itself is exposed as ``mixed-inverse``
(see cli/config ``convention``).
"""

from __future__ import annotations

import itertools

from . import intlinalg as il
from .rootsys import (
    CapExceeded,
    GroupDatum,
    WeylGroup,
    geometric_center_order,
    weyl_order,
)
from .coendoscopy import StrataPoset, Stratum, canonical_subset, \
    equal_rank_subsystems
from .torus import Subsystem, subgroup_points

CONVENTIONS = ("uniform-inverse", "mixed-inverse")
DEFAULT_ORBIT_CAP = 1_000_000

INFINITY_TAG = "inf"


class MissingCount(KeyError):
    pass


class PlaceData:
    """One place: a tag ('inf' or a finite-place name) and a character."""

    def __init__(self, tag: str, lam, torus: str = "split"):
        self.tag = tag
        self.lam = tuple(int(x) for x in lam)
        if torus != "split":
            # H^1(kappa_v, W)-twisted coset spaces would plug in here.
            raise NotImplementedError("only split local tori are supported")
        self.torus = torus

    @property
    def is_infinity(self) -> bool:
        return self.tag == INFINITY_TAG

    def to_record(self):
        return {"tag": self.tag, "lambda": list(self.lam)}

    def __repr__(self):
        return f"PlaceData({self.tag}, {list(self.lam)})"


class CharacterSpec:
    """Per-place characters; exactly one place tagged 'inf'."""

    def __init__(self, places):
        self.places = tuple(places)
        infs = [p for p in self.places if p.is_infinity]
        if len(infs) != 1:
            raise ValueError("exactly one place must be tagged 'inf'")
        self.infinity = infs[0]
        self.finite = tuple(p for p in self.places if not p.is_infinity)

    @classmethod
    def from_record(cls, record, rank: int | None = None) -> "CharacterSpec":
        places = [
            PlaceData(p["tag"], p["lambda"], p.get("torus", "split"))
            for p in record["places"]
        ]
        if rank is not None:
            for p in places:
                if len(p.lam) != rank:
                    raise ValueError(
                        f"place {p.tag}: character has length {len(p.lam)}, "
                        f"expected {rank}"
                    )
        return cls(places)

    @classmethod
    def trivial(cls, rank: int, num_finite: int = 1) -> "CharacterSpec":
        places = [PlaceData(INFINITY_TAG, (0,) * rank)]
        places += [
            PlaceData(f"v{i+1}", (0,) * rank) for i in range(num_finite)
        ]
        return cls(places)

    @property
    def num_places(self) -> int:
        return len(self.places)

    def to_record(self):
        return {"places": [p.to_record() for p in self.places]}


def act_character(datum: GroupDatum, weyl: WeylGroup, w: int, lam):
    """w . lambda, i.e. (w.lambda)(x) = lambda(w^-1 x), in X^* coordinates."""
    m = datum.weyl_matrix_x(weyl, weyl.inv(w))
    return il.vecmat(lam, m)


def character_trivial_on(lam, group, m: int) -> bool:
    """Is the residue character of lambda trivial on a subgroup of T(F_q)?"""
    return all(
        sum(a * b for a, b in zip(lam, g)) % m == 0 for g in group.generators
    )


def central_product_test(spec: CharacterSpec, datum: GroupDatum, q: int) -> bool:
    """Triviality of the product of all place characters on Z_G(F_q)."""
    rank = datum.root_system.rank
    total = [0] * rank
    for p in spec.places:
        total = [a + b for a, b in zip(total, p.lam)]
    center = subgroup_points(
        datum, q, Subsystem(datum.root_system, range(len(datum.root_system.roots)))
    )
    return character_trivial_on(tuple(total), center, q - 1)


class GammaTuple:
    """Minimal-length W_iota coset representatives, one per finite place."""

    __slots__ = ("reps",)

    def __init__(self, reps):
        self.reps = tuple(reps)

    def __eq__(self, other):
        return isinstance(other, GammaTuple) and self.reps == other.reps

    def __lt__(self, other):
        return self.reps < other.reps

    def __hash__(self):
        return hash(self.reps)

    def __repr__(self):
        return f"GammaTuple{self.reps}"


def total_character(
    datum: GroupDatum,
    weyl: WeylGroup,
    spec: CharacterSpec,
    gamma: GammaTuple,
    w: int,
    convention: str = "uniform-inverse",
):
    """The combined character evaluated against torsion points.

    uniform-inverse:  Lambda = -sum_v gamma_v.lambda_v - w.lambda_inf
    mixed-inverse:      Lambda = -sum_v gamma_v.lambda_v + w.lambda_inf
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    rank = datum.root_system.rank
    lam = [0] * rank
    for g, place in zip(gamma.reps, spec.finite):
        moved = act_character(datum, weyl, g, place.lam)
        lam = [a - b for a, b in zip(lam, moved)]
    inf = act_character(datum, weyl, w, spec.infinity.lam)
    if convention == "uniform-inverse":
        lam = [a - b for a, b in zip(lam, inf)]
    else:
        lam = [a + b for a, b in zip(lam, inf)]
    return tuple(lam)


def stratum_sum(lam, poset: StrataPoset, stratum_index: int) -> int:
    """Sum of the character over S_iota, via Möbius inversion and
    orthogonality on each group Z below: always an exact integer."""
    m = poset.q - 1
    acc = 0
    for i in poset.below(stratum_index):
        st = poset.strata[i]
        if character_trivial_on(lam, st.z_group, m):
            acc += poset.mobius_table[(i, stratum_index)] * st.z_order
    return acc


def coset_representatives(poset: StrataPoset, stratum_index: int,
                          subgroup: tuple[int, ...]) -> list[int]:
    """Canonical (minimal length) representatives of subgroup\\W."""
    return [rep for rep, _ in poset.weyl.cosets(subgroup)]


def n_coefficient(
    datum: GroupDatum,
    poset: StrataPoset,
    stratum_index: int,
    gamma: GammaTuple,
    spec: CharacterSpec,
    convention: str = "uniform-inverse",
) -> int:
    """The integer coefficient of one (stratum, coset tuple) row: the sum
    over canonical C_W(iota)\\W representatives of the stratum sums."""
    cw = poset.cw_indices(stratum_index)
    reps = coset_representatives(poset, stratum_index, cw)
    total = 0
    for w in reps:
        lam = total_character(datum, poset.weyl, spec, gamma, w, convention)
        total += stratum_sum(lam, poset, stratum_index)
    return total


def _coset_rep_map(weyl: WeylGroup, subgroup):
    cosets = weyl.cosets(subgroup)
    member_to_rep = {}
    for rep, members in cosets:
        for x in members:
            member_to_rep[x] = rep
    return [rep for rep, _ in cosets], member_to_rep


def _tuple_orbits(poset: StrataPoset, stratum_index: int,
                  num_finite_places: int, cap: int):
    """Orbits of C_W(iota) by simultaneous conjugation on coset tuples,
    as (lex-least representative tuple, sorted member list) pairs."""
    weyl = poset.weyl
    wiota = poset.wiota_indices(stratum_index)
    reps, to_rep = _coset_rep_map(weyl, wiota)
    total = len(reps) ** num_finite_places
    if total > cap:
        raise CapExceeded(
            f"{len(reps)}^{num_finite_places} coset tuples exceed cap {cap}",
            order=total,
        )
    cw = poset.cw_indices(stratum_index)
    conj = {}
    for c in cw:
        cinv = weyl.inv(c)
        conj[c] = {g: to_rep[weyl.mul(weyl.mul(cinv, g), c)] for g in reps}
    seen = set()
    out = []
    for tup in itertools.product(reps, repeat=num_finite_places):
        if tup in seen:
            continue
        orbit = {tup}
        frontier = [tup]
        while frontier:
            cur = frontier.pop()
            for c in cw:
                img = tuple(conj[c][g] for g in cur)
                if img not in orbit:
                    orbit.add(img)
                    frontier.append(img)
        seen |= orbit
        out.append((min(orbit), sorted(orbit)))
    out.sort(key=lambda pair: pair[0])
    return out


def orbit_decomposition(
    poset: StrataPoset,
    stratum_index: int,
    num_finite_places: int,
    cap: int = DEFAULT_ORBIT_CAP,
) -> list[tuple[GammaTuple, int]]:
    """Orbits of C_W(iota) acting by simultaneous conjugation on tuples of
    W_iota\\W cosets; returns (lex-least representative, orbit size) pairs."""
    return [
        (GammaTuple(rep), len(members))
        for rep, members in _tuple_orbits(
            poset, stratum_index, num_finite_places, cap
        )
    ]


class NTableRow:
    def __init__(self, stratum_index: int, stratum: Stratum, orbit_rep: GammaTuple,
                 orbit_size: int, n: int, n_sum: int, n_abs_sum: int):
        self.stratum_index = stratum_index
        self.stratum = stratum
        self.orbit_rep = orbit_rep
        self.orbit_size = orbit_size
        self.n = n
        self.n_sum = n_sum
        self.n_abs_sum = n_abs_sum

    def key(self):
        return (self.stratum.canonical_key, self.orbit_rep.reps)

    def to_record(self):
        return {
            "stratum_type": self.stratum.signature,
            "orbit_rep": list(self.orbit_rep.reps),
            "orbit_size": self.orbit_size,
            "n": self.n,
            "n_sum": self.n_sum,
        }

    def __repr__(self):
        return (
            f"NTableRow({self.stratum.signature}, rep={self.orbit_rep.reps}, "
            f"size={self.orbit_size}, n={self.n})"
        )


class NTable:
    """Rows keyed by (stratum class, coset-tuple orbit).

    ``n`` is the coefficient of the canonical orbit representative; ``n_sum``
    sums the coefficients over the whole orbit (that is the quantity each
    orbit contributes to the assembled prediction, the per-orbit point
    counts being equal).
    """

    def __init__(self, datum: GroupDatum, q: int, spec: CharacterSpec,
                 convention: str, rows: list[NTableRow]):
        self.datum = datum
        self.q = q
        self.spec = spec
        self.convention = convention
        self.rows = tuple(rows)

    @property
    def total_abs(self) -> int:
        return sum(row.n_abs_sum for row in self.rows)

    def minimal_rows(self) -> list[NTableRow]:
        full = len(self.datum.root_system.roots)
        return [
            row for row in self.rows
            if len(row.stratum.subsystem.indices) == full
        ]

    def to_records(self):
        return [row.to_record() for row in self.rows]


def n_table(
    datum: GroupDatum,
    q: int,
    spec: CharacterSpec,
    poset: StrataPoset,
    convention: str = "uniform-inverse",
    orbit_cap: int = DEFAULT_ORBIT_CAP,
) -> NTable:
    """One row per (stratum class representative, coset-tuple orbit)."""
    rows = []
    nf = len(spec.finite)
    for si in poset.class_representatives():
        for rep, members in _tuple_orbits(poset, si, nf, orbit_cap):
            values = [
                n_coefficient(datum, poset, si, GammaTuple(t), spec, convention)
                for t in members
            ]
            rows.append(
                NTableRow(
                    si, poset.strata[si], GammaTuple(rep), len(members),
                    values[0], sum(values), sum(abs(v) for v in values),
                )
            )
    rows.sort(key=lambda r: (r.stratum.key, r.orbit_rep.reps))
    return NTable(datum, q, spec, convention, rows)


def bound_constant(datum: GroupDatum, num_places: int) -> int:
    """Explicit q-independent bound: over geometric subsystem classes,
    |W|^|S| |W_iota|^|S| |Z_iota(geometric)| summed up."""
    rs = datum.root_system
    w_order = weyl_order(rs)
    seen = set()
    total = 0
    for sub in equal_rank_subsystems(rs):
        canon = canonical_subset(rs, sub.indices)
        if canon in seen:
            continue
        seen.add(canon)
        z_geo = geometric_center_order(datum, sub)
        total += (w_order ** num_places) * (sub.weyl_order ** num_places) * z_geo
    return total
