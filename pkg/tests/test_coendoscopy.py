import pytest

from coendo import coendoscopy as C
from coendo import rootsys as R
from coendo import torus as T


def datum_for(name, lat, q):
    return R.make_datum([name], lat, C._char_of(q))


def test_bds_g2():
    cls = C.borel_de_siebenthal(R.build_root_system(["G2"]))
    assert sorted(cl.signature for cl in cls) == ["A1xA1", "A2"]


def test_bds_type_a_empty():
    for name in ["A1", "A2", "A5"]:
        assert C.borel_de_siebenthal(R.build_root_system([name])) == []


def test_bds_b2():
    cls = C.borel_de_siebenthal(R.build_root_system(["B2"]))
    assert [cl.signature for cl in cls] == ["A1xA1"]


def test_bds_f4():
    cls = C.borel_de_siebenthal(R.build_root_system(["F4"]))
    assert sorted(cl.signature for cl in cls) == ["A1xC3", "A2xA2", "B4"]


def test_bds_e_types():
    e6 = C.borel_de_siebenthal(R.build_root_system(["E6"]))
    assert sorted(cl.signature for cl in e6) == ["A1xA5", "A2xA2xA2"]
    e7 = C.borel_de_siebenthal(R.build_root_system(["E7"]))
    assert sorted(cl.signature for cl in e7) == ["A1xD6", "A2xA5", "A7"]
    e8 = C.borel_de_siebenthal(R.build_root_system(["E8"]))
    assert sorted(cl.signature for cl in e8) == [
        "A1xE7", "A2xE6", "A4xA4", "A8", "D8"]


def test_bds_merges_conjugate_nodes():
    # in C3 the two prime-coefficient nodes give W-conjugate subsystems
    cls = C.borel_de_siebenthal(R.build_root_system(["C3"]))
    assert len(cls) == 1
    assert cls[0].equivalent_nodes == ((0, 1),)


def test_bds_classes_pairwise_non_conjugate():
    for name in ["B3", "C4", "D4", "G2", "F4", "B4", "D5"]:
        rs = R.build_root_system([name])
        canons = [
            C.canonical_subset(rs, cl.subsystem.indices)
            for cl in C.borel_de_siebenthal(rs)
        ]
        assert len(canons) == len(set(canons))


def test_bds_product_combinations():
    rs = R.build_root_system(["B2", "B2"])
    cls = C.borel_de_siebenthal(rs)
    # choices: (opt, None), (None, opt), (opt, opt); never the all-trivial one
    assert len(cls) == 3
    assert sorted(cl.signature for cl in cls) == [
        "A1xA1xA1xA1", "A1xA1xB2", "A1xA1xB2"]
    for cl in cls:
        assert cl.subsystem.rank == 4
        assert not cl.is_whole_group


def test_class_representative_point_recovers_subsystem():
    for name, lat, q in [("B2", "sc", 5), ("G2", "ad", 7), ("B3", "sc", 5)]:
        datum = datum_for(name, lat, q)
        for cl in C.classify(datum, q):
            if cl.is_whole_group or not cl.rational_over_fq:
                continue
            pt = cl.torus_point(datum, q)
            sub = T.centralizer_subsystem(datum, pt)
            assert sub.indices == cl.subsystem.indices
            assert T.is_elliptic(datum, pt)


def test_classify_rationality_g2():
    datum = R.make_datum(["G2"], "ad", 7)
    flags = {cl.signature: cl.rational_over_fq for cl in C.classify(datum, 7)}
    assert flags == {"G2": True, "A2": True, "A1xA1": True}
    flags5 = {cl.signature: cl.rational_over_fq
              for cl in C.classify(R.make_datum(["G2"], "ad", 5), 5)}
    assert flags5 == {"G2": True, "A2": False, "A1xA1": True}


def test_classify_type_a_only_whole_group():
    datum = R.make_datum(["A3"], "sc", 5)
    cls = C.classify(datum, 5)
    assert len(cls) == 1 and cls[0].is_whole_group


def test_equal_rank_subsystems_structure():
    rs = R.build_root_system(["G2"])
    subs = C.equal_rank_subsystems(rs)
    assert len(subs) == 5
    for sub in subs:
        assert sub.rank == 2
        assert sub.is_closed()
    rs4 = R.build_root_system(["F4"])
    types = {s.signature for s in C.equal_rank_subsystems(rs4)}
    assert types == {"F4", "B4", "A1xC3", "A2xA2", "D4", "A1xA3",
                     "A1xA1xB2", "A1xA1xA1xA1"}


def test_equal_rank_subsystems_weyl_stable():
    rs = R.build_root_system(["B3"])
    subs = {s.indices for s in C.equal_rank_subsystems(rs)}
    perms = C._node_reflection_perms(rs)
    for s in subs:
        for perm in perms:
            assert frozenset(perm[i] for i in s) in subs


GRID = [("A1", 5), ("A1", 9), ("A2", 7), ("B2", 5), ("B2", 13), ("B3", 5),
        ("C3", 9), ("D4", 5), ("G2", 7), ("G2", 13), ("F4", 7), ("F4", 13)]


@pytest.mark.parametrize("name,q", GRID)
def test_routes_agree(name, q):
    datum = datum_for(name, "sc", q)
    w = R.weyl_generate(datum.root_system)
    pe = C.strata_poset(datum, q, "enumerate", weyl=w)
    pc = C.strata_poset(datum, q, "classify", weyl=w)
    assert [(s.key, s.s_size, s.z_order) for s in pe.strata] == \
        [(s.key, s.s_size, s.z_order) for s in pc.strata]
    assert pe.mobius_table == pc.mobius_table


def test_e6_routes_agree():
    # beyond the rank-4 grid: 77 strata (E6, 36 x A1A5, 40 x 3A2)
    datum = R.make_datum(["E6"], "sc", 7)
    w = R.weyl_generate(datum.root_system)
    pe = C.strata_poset(datum, 7, "enumerate", weyl=w)
    pc = C.strata_poset(datum, 7, "classify", weyl=w)
    assert [(s.key, s.s_size, s.z_order) for s in pe.strata] == \
        [(s.key, s.s_size, s.z_order) for s in pc.strata]
    assert len(pe) == 77
    assert sorted({s.signature for s in pe.strata}) == \
        ["A1xA5", "A2xA2xA2", "E6"]
    assert C.reeder_partition_check(pe).passed


def test_classify_route_scales_past_enumeration_cap():
    from coendo import coefficients as K

    datum = R.make_datum(["B2"], "sc", 1009)
    w = R.weyl_generate(datum.root_system)
    with pytest.raises(R.CapExceeded):
        C.strata_poset(datum, 1009, "enumerate", weyl=w)
    poset = C.strata_poset(datum, 1009, "classify", weyl=w)
    assert [(s.signature, s.s_size, s.z_order) for s in poset.strata] == \
        [("B2", 2, 2), ("A1xA1", 2, 4)]
    # the coefficient table is field-stable against a small admissible q
    spec = K.CharacterSpec.trivial(2, 1)
    big = K.n_table(datum, 1009, spec, poset)
    small = K.n_table(datum, 5, spec,
                      C.strata_poset(datum, 5, "classify", weyl=w))
    assert {r.key(): (r.n, r.n_sum) for r in big.rows} == \
        {r.key(): (r.n, r.n_sum) for r in small.rows}


def test_product_group_routes_and_partition():
    # factor-wise deletion on a product, validated against enumeration
    datum = R.make_datum(["B2", "A1"], "sc", 5)
    w = R.weyl_generate(datum.root_system)
    pe = C.strata_poset(datum, 5, "enumerate", weyl=w)
    pc = C.strata_poset(datum, 5, "classify", weyl=w)
    assert [(s.key, s.s_size, s.z_order) for s in pe.strata] == \
        [(s.key, s.s_size, s.z_order) for s in pc.strata]
    assert C.reeder_partition_check(pe).passed
    assert sorted(s.signature for s in pe.strata) == ["A1xA1xA1", "A1xB2"]
    for st in pe.strata:
        assert st.subsystem.rank == 3


def test_minimal_stratum_is_center():
    for name, lat, q in [("A1", "sc", 5), ("B2", "sc", 5), ("G2", "ad", 7),
                         ("A1", "ad", 9)]:
        datum = datum_for(name, lat, q)
        poset = C.strata_poset(datum, q, "enumerate")
        i = poset.minimal_index
        st = poset.strata[i]
        center = T.subgroup_points(
            datum, q,
            T.Subsystem(datum.root_system, range(len(datum.root_system.roots))),
        )
        assert st.s_size == center.order == st.z_order
        # minimal for the order: below everything
        assert all(poset.leq[i][j] for j in range(len(poset)))


def test_b2_poset_shape():
    datum = datum_for("B2", "sc", 5)
    poset = C.strata_poset(datum, 5, "enumerate")
    assert [s.signature for s in poset.strata] == ["B2", "A1xA1"]
    assert [s.s_size for s in poset.strata] == [2, 2]
    assert poset.mobius_table[(0, 1)] == -1
    assert poset.mobius_table[(0, 0)] == poset.mobius_table[(1, 1)] == 1


def test_mobius_defining_identity():
    datum = datum_for("F4", "sc", 13)
    poset = C.strata_poset(datum, 13, "classify")
    mob = poset.mobius_table
    n = len(poset)
    for i in range(n):
        for j in range(n):
            if not poset.leq[i][j]:
                continue
            total = sum(
                mob[(i, k)] for k in range(n)
                if poset.leq[i][k] and poset.leq[k][j]
            )
            assert total == (1 if i == j else 0)


def test_reeder_partition_grid():
    for name, q in GRID:
        datum = datum_for(name, "sc", q)
        poset = C.strata_poset(datum, q, "enumerate")
        verdict = C.reeder_partition_check(poset)
        assert verdict.passed, verdict.witness


def test_reeder_needs_points():
    datum = datum_for("A1", "sc", 5)
    poset = C.strata_poset(datum, 5, "classify")
    assert not C.reeder_partition_check(poset).passed


def test_stratum_invariants():
    datum = datum_for("G2", "ad", 7)
    poset = C.strata_poset(datum, 7, "enumerate")
    for i, st in enumerate(poset.strata):
        assert st.s_size <= st.z_order
        cw = poset.cw_indices(i)
        wiota = poset.wiota_indices(i)
        assert set(wiota) <= set(cw)
        assert len(wiota) == st.w_iota_order
        assert poset.weyl.order % len(cw) == 0


def test_canonical_class_representatives():
    datum = datum_for("G2", "ad", 7)
    poset = C.strata_poset(datum, 7, "enumerate")
    reps = poset.class_representatives()
    # G2, A2, and one representative of the three A1xA1 strata
    assert len(reps) == 3
    orbit_sizes = sorted(len(poset.orbit_indices(i)) for i in reps)
    assert orbit_sizes == [1, 1, 3]


@pytest.mark.parametrize("name,q,car_ok,car2_ok", [
    ("B2", 13, True, True),
    ("C3", 9, True, True),
    ("G2", 7, True, True),
    ("A3", 5, True, True),
])
def test_rationality_tables(name, q, car_ok, car2_ok):
    car, car2 = C.rationality_tables_check(R.SimpleType.parse(name), q)
    assert car.passed == car_ok
    assert car2.passed == car2_ok


@pytest.mark.parametrize("name,q", [("E6", 19), ("E7", 25), ("E8", 31)])
def test_rationality_tables_exceptional(name, q):
    # no enumeration involved: membership and Smith forms only
    car, car2 = C.rationality_tables_check(R.SimpleType.parse(name), q)
    assert car.passed and car.details["applicable"]
    assert car2.passed


def test_rationality_table_values():
    assert C.car_divisor(R.SimpleType.parse("C4")) == 4
    assert C.car_divisor(R.SimpleType.parse("C3")) == 8
    assert C.car_divisor(R.SimpleType.parse("A5")) is None
    assert C.car_divisor(R.SimpleType.parse("E7")) == 12
    assert C.car2_divisor(R.SimpleType.parse("A5")) == 6
    assert C.car2_divisor(R.SimpleType.parse("E8")) == 90
    assert C.car2_divisor(R.SimpleType.parse("D6")) == 8
