import pytest

from monadlab.algebra import check_algebra, check_morphism, enumerate_algebras
from monadlab.finset import (
    ExpCodec,
    FinSet,
    FinSetError,
    Morphism,
    classify,
    compose,
    curry,
    evaluation,
    exp_map,
    hom,
    identity,
    product_map,
)
from monadlab.monadicity import (
    base_iso,
    base_map,
    check_suite,
    compare_inverse,
    compare_is_algebra_map,
    compare_retraction,
    compare_section,
    empty_state_diagnostic,
    epi_section,
    extract_base,
    function_algebra,
    function_algebra_map,
    section_retraction,
    verify_monadicity,
)
from monadlab.statemonad import StateMonadCtx


class TestFunctionAlgebra:
    def test_carrier_sizes(self, ctx2):
        assert function_algebra(ctx2, 2).carrier.size == 4
        assert function_algebra(ctx2, 0).carrier.size == 0
        assert function_algebra(ctx2, 1).carrier.size == 1

    def test_structure_among_classification(self, ctx2, twelve):
        ka = function_algebra(ctx2, 2)
        assert ka.structure.table in [a.structure.table for a in twelve]

    def test_singleton_state(self, ctx1):
        ka = function_algebra(ctx1, 3)
        assert ka.carrier.size == 3
        assert ka.structure.table == identity(3).table

    def test_empty_base(self, ctx2):
        ka = function_algebra(ctx2, 0)
        assert ka.structure.table == ()

    def test_map_functorial(self, ctx2):
        for f in hom(2, 3):
            for g in hom(3, 2):
                kf = function_algebra_map(ctx2, f)
                kg = function_algebra_map(ctx2, g)
                kgf = function_algebra_map(ctx2, compose(g, f))
                assert kgf.map.table == compose(kg.map, kf.map).table
        y = FinSet(3)
        assert (
            function_algebra_map(ctx2, identity(y)).map.table
            == identity(ExpCodec(y, ctx2.state).obj).table
        )

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_every_exponentiated_map_is_algebra_morphism(self, s):
        ctx = StateMonadCtx(s)
        for yn in range(4):
            src = function_algebra(ctx, yn, validate=False)
            for zn in range(4):
                dst = function_algebra(ctx, zn, validate=False)
                for v in hom(yn, zn):
                    assert check_morphism(exp_map(v, ctx.state), src, dst)


class TestExtractBase:
    def test_bases_of_the_twelve(self, twelve):
        for alg in twelve:
            data = extract_base(alg)
            assert data.base.size == 2
            assert compose(data.mono, data.epi).table == data.reach.table
            assert classify(data.epi).epi and classify(data.mono).mono

    def test_singleton_state_base_is_carrier(self, ctx1):
        for alg in enumerate_algebras(ctx1, 3):
            data = extract_base(alg)
            assert data.base.size == 3

    def test_function_algebra_base_recovers(self, ctx2):
        for yn in range(4):
            data = extract_base(function_algebra(ctx2, yn, validate=False))
            assert data.base.size == yn

    def test_transpose_triangle(self, ctx2, twelve):
        for alg in twelve:
            data = extract_base(alg)
            lhs = compose(exp_map(data.mono, ctx2.state), data.compare)
            rhs = curry(data.reach, ctx2.pair_codec(alg.carrier))
            assert lhs.table == rhs.table


class TestCompareInverse:
    def test_two_sided_inverse_on_the_twelve(self, twelve):
        for alg in twelve:
            data = extract_base(alg)
            inv = compare_inverse(data)
            assert compose(inv, data.compare).table == identity(alg.carrier).table
            dom = inv.dom
            assert compose(data.compare, inv).table == identity(dom).table

    def test_singleton_state(self, ctx1):
        for alg in enumerate_algebras(ctx1, 4):
            data = extract_base(alg)
            inv = compare_inverse(data)
            assert compose(inv, data.compare).table == identity(alg.carrier).table

    def test_agreement_with_retraction_and_section(self, twelve):
        for alg in twelve:
            data = extract_base(alg)
            inv = compare_inverse(data)
            assert compare_retraction(data).table == inv.table
            for s0 in (0, 1):
                assert compare_section(data, s0).table == inv.table


class TestRetractionAndSection:
    def test_retraction_identity(self, twelve):
        for alg in twelve:
            data = extract_base(alg)
            retr = compare_retraction(data)
            assert compose(retr, data.compare).table == identity(alg.carrier).table

    def test_section_identities_for_every_chosen_state(self, twelve):
        for alg in twelve:
            data = extract_base(alg)
            exp_obj = ExpCodec(data.base, alg.ctx.state).obj
            for s0 in (0, 1):
                sigma = epi_section(data, s0)
                assert compose(data.epi, sigma).table == identity(data.base).table
                big = compare_section(data, s0)
                assert compose(data.compare, big).table == identity(exp_obj).table

    def test_section_requires_chosen_state(self):
        # an empty-state context has no chosen state and hence no section
        ctx0 = StateMonadCtx(0)
        alg = check_algebra(ctx0, FinSet(1), Morphism(FinSet(1), FinSet(1), (0,)))
        data0 = extract_base(alg)
        with pytest.raises(FinSetError):
            epi_section(data0)

    def test_section_retraction_bundle(self, twelve):
        bundle = section_retraction(extract_base(twelve[3]))
        assert bundle.section is not None
        assert bundle.retraction.table == bundle.section.table


class TestCompareIsAlgebraMap:
    def test_holds_on_the_twelve(self, twelve):
        for alg in twelve:
            assert compare_is_algebra_map(extract_base(alg))

    def test_holds_at_singleton_state(self, ctx1):
        for alg in enumerate_algebras(ctx1, 3):
            assert compare_is_algebra_map(extract_base(alg))

    def test_corrupted_structure_detected(self, ctx2, twelve):
        # corrupt one entry away from the unit image; the comparison square
        # must break even though the data still typechecks
        alg = twelve[0]
        table = list(alg.structure.table)
        unit_cells = {alg.ctx.unit_at(alg.carrier, v) for v in range(4)}
        cell = next(t for t in range(len(table)) if t not in unit_cells)
        table[cell] = (table[cell] + 1) % 4
        from monadlab.algebra import TAlgebra

        bad = TAlgebra(
            alg.ctx,
            alg.carrier,
            Morphism(alg.structure.dom, alg.carrier, tuple(table)),
            checked="none",
        )
        data = extract_base(bad)
        assert not (
            compare_is_algebra_map(data)
            and compose(compare_inverse(data), data.compare).table
            == identity(alg.carrier).table
        )


class TestBaseMap:
    def test_identity(self, twelve):
        data = extract_base(twelve[0])
        lu = base_map(identity(twelve[0].carrier), data, data)
        assert lu.table == identity(data.base).table

    def test_commutes_with_surjections(self, ctx2):
        d2 = extract_base(function_algebra(ctx2, 2, validate=False))
        d3 = extract_base(function_algebra(ctx2, 3, validate=False))
        for v in hom(2, 3):
            u = exp_map(v, ctx2.state)
            lu = base_map(u, d2, d3)
            lhs = compose(lu, d2.epi)
            rhs = compose(d3.epi, product_map(identity(ctx2.state), u))
            assert lhs.table == rhs.table

    def test_functorial_on_exponentiated_maps(self, ctx2):
        data = {
            yn: extract_base(function_algebra(ctx2, yn, validate=False))
            for yn in range(4)
        }
        for f in hom(2, 3):
            for g in hom(3, 2):
                uf = exp_map(f, ctx2.state)
                ug = exp_map(g, ctx2.state)
                lhs = base_map(compose(ug, uf), data[2], data[2])
                rhs = compose(
                    base_map(ug, data[3], data[2]), base_map(uf, data[2], data[3])
                )
                assert lhs.table == rhs.table

    def test_fiber_collision_detected(self, ctx2, twelve):
        # a map that is not an algebra morphism hits a fiber collision
        a = twelve[0]
        data = extract_base(a)
        bad = next(
            u for u in hom(a.carrier, a.carrier) if not check_morphism(u, a, a)
        )
        with pytest.raises(FinSetError):
            base_map(bad, data, data)


class TestBaseIso:
    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_iso_and_equations(self, s):
        ctx = StateMonadCtx(s)
        for yn in range(4):
            y = FinSet(yn)
            data = extract_base(function_algebra(ctx, y, validate=False))
            xi = base_iso(ctx, y, data)
            assert classify(xi).iso
            assert data.base.size == yn
            assert compose(xi, data.epi).table == evaluation(y, ctx.state).table
            assert compose(ctx.const_map(y), xi).table == data.mono.table

    def test_mono_image_is_constant_codes(self, ctx2):
        for yn in range(4):
            y = FinSet(yn)
            data = extract_base(function_algebra(ctx2, y, validate=False))
            assert set(data.mono.table) == set(ctx2.const_map(y).table)

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_naturality(self, s):
        ctx = StateMonadCtx(s)
        datas = {
            yn: extract_base(function_algebra(ctx, yn, validate=False))
            for yn in range(4)
        }
        isos = {yn: base_iso(ctx, FinSet(yn), datas[yn]) for yn in range(4)}
        for y1 in range(4):
            for y2 in range(4):
                for v in hom(y1, y2):
                    lv = base_map(exp_map(v, ctx.state), datas[y1], datas[y2])
                    lhs = compose(isos[y2], lv)
                    rhs = compose(v, isos[y1])
                    assert lhs.table == rhs.table

    def test_requires_nonempty_state(self):
        with pytest.raises(FinSetError):
            base_iso(StateMonadCtx(0), 2)


class TestCheckSuite:
    def test_all_green_on_the_twelve(self, twelve):
        for alg in twelve:
            suite = check_suite(alg)
            assert all(suite.values()), suite

    def test_all_green_on_function_algebras(self, ctx2, ctx3):
        for ctx in (ctx2, ctx3):
            for yn in range(3):
                suite = check_suite(function_algebra(ctx, yn, validate=False))
                assert all(suite.values()), (ctx.state.size, yn, suite)


class TestVerify:
    def test_two_states(self):
        report = verify_monadicity(2, 4)
        assert report.passed
        assert report.carriers[2]["count"] == 0
        assert report.carriers[3]["count"] == 0
        assert report.carriers[4]["count"] == 12
        assert report.carriers[1]["count"] == 1

    def test_one_state(self):
        report = verify_monadicity(1, 4)
        assert report.passed
        assert all(
            report.carriers[x]["count"] == 1 for x in range(5)
        )

    def test_refuses_empty_state(self):
        with pytest.raises(FinSetError):
            verify_monadicity(0, 2)

    def test_report_serialization_is_stable(self):
        a = verify_monadicity(2, 2, seed=7).to_json()
        b = verify_monadicity(2, 2, seed=7).to_json()
        assert a == b
        text = verify_monadicity(2, 2, seed=7).to_text()
        assert text.endswith("PASSED")

    def test_guarded_carrier_reported(self):
        # a ceiling wide enough for carrier 4 but not for carrier 5
        report = verify_monadicity(2, 5, ceiling=400_000)
        assert report.carriers[5]["guarded"] is not None
        assert report.carriers[4]["count"] == 12


class TestEmptyStateDiagnostic:
    def test_only_singletons_admit_structures(self):
        diag = empty_state_diagnostic(3)
        assert diag["algebra_counts"] == {"0": 0, "1": 1, "2": 0, "3": 0}
        assert diag["carriers_with_algebras"] == [1]
        assert diag["essential_surjectivity_fails"]
