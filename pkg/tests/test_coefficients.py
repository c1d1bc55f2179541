import random

import pytest

from coendo import coefficients as K
from coendo import coendoscopy as C
from coendo import oracle as O
from coendo import rootsys as R
from coendo import torus as T


def setup_group(name, lat, q):
    datum = R.make_datum([name], lat, C._char_of(q))
    weyl = R.weyl_generate(datum.root_system)
    poset = C.strata_poset(datum, q, "enumerate", weyl=weyl)
    return datum, weyl, poset


def test_spec_validation():
    with pytest.raises(ValueError):
        K.CharacterSpec([K.PlaceData("v1", (0,))])
    with pytest.raises(ValueError):
        K.CharacterSpec([K.PlaceData("inf", (0,)), K.PlaceData("inf", (0,))])
    with pytest.raises(NotImplementedError):
        K.PlaceData("v1", (0,), torus="elliptic")
    spec = K.CharacterSpec.from_record(
        {"places": [{"tag": "inf", "lambda": [1, 2]},
                    {"tag": "v1", "lambda": [0, 1]}]}, rank=2)
    assert spec.num_places == 2 and spec.infinity.lam == (1, 2)
    with pytest.raises(ValueError):
        K.CharacterSpec.from_record(
            {"places": [{"tag": "inf", "lambda": [1]}]}, rank=2)


def test_central_product_examples():
    sl2 = R.make_datum(["A1"], "sc", 5)
    trivial = K.CharacterSpec.trivial(1, 1)
    assert K.central_product_test(trivial, sl2, 5)
    one = K.CharacterSpec([K.PlaceData("inf", (0,)), K.PlaceData("v1", (1,))])
    assert not K.central_product_test(one, sl2, 5)
    two = K.CharacterSpec([K.PlaceData("inf", (1,)), K.PlaceData("v1", (1,))])
    assert K.central_product_test(two, sl2, 5)


def test_total_character_examples():
    datum, weyl, poset = setup_group("A1", "sc", 5)
    trivial = K.CharacterSpec.trivial(1, 1)
    gamma = K.GammaTuple((0,))
    assert K.total_character(datum, weyl, trivial, gamma, 0) == (0,)
    spec = K.CharacterSpec([K.PlaceData("inf", (1,)), K.PlaceData("v1", (2,))])
    # identity coset, identity w: -(sum of lambdas)
    assert K.total_character(datum, weyl, spec, gamma, 0) == (-3,)
    # the nontrivial reflection negates the weight
    refl = 1
    assert K.act_character(datum, weyl, refl, (1,)) == (-1,)
    assert K.total_character(datum, weyl, spec, gamma, refl) == (-1,)
    # mixed-inverse flips the infinity sign
    assert K.total_character(datum, weyl, spec, gamma, 0,
                             "mixed-inverse") == (-1,)


def test_stratum_sum_examples():
    datum, weyl, poset = setup_group("B2", "sc", 5)
    for i, st in enumerate(poset.strata):
        assert K.stratum_sum((0, 0), poset, i) == st.s_size
    # a character nontrivial on the center kills the minimal stratum
    i0 = poset.minimal_index
    lam = (0, 1)
    center = poset.strata[i0].z_group
    assert not K.character_trivial_on(lam, center, 4)
    assert K.stratum_sum(lam, poset, i0) == 0
    assert O.direct_stratum_sum(lam, poset, i0) == 0


def test_stratum_sum_randomized_vs_cyclotomic():
    rng = random.Random(13)
    for name, lat, q in [("B2", "sc", 5), ("G2", "ad", 7), ("B3", "sc", 9)]:
        datum, weyl, poset = setup_group(name, lat, q)
        rank = datum.root_system.rank
        for _ in range(40):
            lam = tuple(rng.randint(-3 * q, 3 * q) for _ in range(rank))
            for i in range(len(poset)):
                verdict = O.cyclotomic_sum_check(lam, poset, i)
                assert verdict.passed, verdict.witness


def test_n_minimal_stratum_rule():
    datum, weyl, poset = setup_group("A1", "sc", 5)
    i0 = poset.minimal_index
    gamma = K.GammaTuple((0,))
    passing = K.CharacterSpec([K.PlaceData("inf", (3,)), K.PlaceData("v1", (1,))])
    assert K.central_product_test(passing, datum, 5)
    assert K.n_coefficient(datum, poset, i0, gamma, passing) == 2
    failing = K.CharacterSpec([K.PlaceData("inf", (2,)), K.PlaceData("v1", (1,))])
    assert not K.central_product_test(failing, datum, 5)
    assert K.n_coefficient(datum, poset, i0, gamma, failing) == 0


def test_n_all_trivial_counts_cosets():
    # every summand is 1, so n = |C_W(iota)\\W| * |S_iota|
    datum, weyl, poset = setup_group("G2", "ad", 7)
    trivial = K.CharacterSpec.trivial(2, 1)
    for si in poset.class_representatives():
        cw = poset.cw_indices(si)
        cosets = weyl.order // len(cw)
        got = K.n_coefficient(datum, poset, si, K.GammaTuple((0,)), trivial)
        assert got == cosets * poset.strata[si].s_size


def test_coset_independence_in_wiota():
    # replacing a coset representative by another member changes nothing
    rng = random.Random(3)
    datum, weyl, poset = setup_group("B2", "sc", 13)
    spec = O.random_spec(2, 1, rng)
    for si in poset.class_representatives():
        wiota = poset.wiota_indices(si)
        reps = [rep for rep, _ in weyl.cosets(wiota)]
        for rep in reps:
            base = K.n_coefficient(datum, poset, si, K.GammaTuple((rep,)), spec)
            for u in wiota:
                other = weyl.mul(u, rep)
                got = K.n_coefficient(datum, poset, si,
                                      K.GammaTuple((other,)), spec)
                assert got == base


def test_orbit_decomposition_examples():
    datum, weyl, poset = setup_group("B2", "sc", 5)
    i0 = poset.minimal_index
    # minimal stratum: single coset, single orbit of size 1
    assert K.orbit_decomposition(poset, i0, 1) == [(K.GammaTuple((0,)), 1)]
    # A1xA1 stratum: two cosets per place, conjugation is trivial on the
    # 2-element quotient, so four singleton orbits over two places
    i1 = [i for i in range(len(poset)) if i != i0][0]
    orbits = K.orbit_decomposition(poset, i1, 2)
    assert len(orbits) == 4
    assert all(size == 1 for _, size in orbits)
    sizes = sum(size for _, size in K.orbit_decomposition(poset, i1, 1))
    wiota = poset.wiota_indices(i1)
    assert sizes == weyl.order // len(wiota)


def test_orbit_cap():
    datum, weyl, poset = setup_group("B2", "sc", 5)
    i1 = [i for i in range(len(poset)) if i != poset.minimal_index][0]
    with pytest.raises(R.CapExceeded):
        K.orbit_decomposition(poset, i1, 30, cap=1000)


def test_n_table_structure():
    datum, weyl, poset = setup_group("G2", "ad", 7)
    rng = random.Random(5)
    spec = O.random_spec(2, 2, rng)
    table = K.n_table(datum, 7, spec, poset)
    reps = poset.class_representatives()
    per_stratum = {}
    for row in table.rows:
        per_stratum.setdefault(row.stratum_index, 0)
        per_stratum[row.stratum_index] += 1
        assert isinstance(row.n, int)
        assert row.orbit_size >= 1
    assert set(per_stratum) == set(reps)
    # row count per stratum equals the number of orbits
    for si in reps:
        assert per_stratum[si] == len(K.orbit_decomposition(poset, si, 2))


def test_n_table_type_a_single_row():
    datum, weyl, poset = setup_group("A2", "sc", 7)
    trivial = K.CharacterSpec.trivial(2, 1)
    table = K.n_table(datum, 7, trivial, poset)
    assert len(table.rows) == 1
    assert table.rows[0].n == 3  # |Z(SL3)(F_7)|


def test_bound_constant_examples():
    sl2 = R.make_datum(["A1"], "sc", 5)
    # single stratum: |W|^2 * |W|^2 * |Z| = 4 * 4 * 2
    assert K.bound_constant(sl2, 2) == 32
    sp4 = R.make_datum(["B2"], "sc", 5)
    # strata: whole group (8*8*2) + long A1xA1 (8*4*4)
    assert K.bound_constant(sp4, 1) == 256


def test_literal_convention_oracle_agreement():
    # both sign conventions agree with their own direct summation
    rng = random.Random(41)
    datum, weyl, poset = setup_group("G2", "ad", 7)
    for _ in range(15):
        spec = O.random_spec(2, 1, rng)
        for si in poset.class_representatives():
            for rep, _ in K.orbit_decomposition(poset, si, 1):
                for conv in K.CONVENTIONS:
                    routed = K.n_coefficient(datum, poset, si, rep, spec, conv)
                    direct = O.direct_n_coefficient(datum, poset, si, rep,
                                                    spec, conv)
                    assert routed == direct


def test_uniform_inverse_is_the_convention_fixing_the_center_rule():
    # with lambda_inf = -lambda_v1 the product character is trivial on the
    # center, and only the uniform-inverse reading returns |Z_G(F_q)| on
    # the minimal stratum; the literal reading breaks on a 3-torsion center
    datum, weyl, poset = setup_group("A2", "sc", 7)
    spec = K.CharacterSpec([K.PlaceData("inf", (1, 0)),
                            K.PlaceData("v1", (-1, 0))])
    assert K.central_product_test(spec, datum, 7)
    i0 = poset.minimal_index
    gamma = K.GammaTuple((0,))
    assert K.n_coefficient(datum, poset, i0, gamma, spec,
                           "uniform-inverse") == 3
    assert K.n_coefficient(datum, poset, i0, gamma, spec,
                           "mixed-inverse") == 0


def test_bound_dominates_tables():
    rng = random.Random(17)
    for name, lat, q in [("A1", "sc", 5), ("B2", "sc", 13), ("G2", "ad", 7)]:
        datum, weyl, poset = setup_group(name, lat, q)
        bound = K.bound_constant(datum, 3)
        for _ in range(10):
            spec = O.random_spec(datum.root_system.rank, 2, rng)
            table = K.n_table(datum, q, spec, poset)
            assert table.total_abs <= bound
