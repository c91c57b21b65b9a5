import json
from math import factorial

import pytest

from monadlab.algebra import (
    AlgebraViolation,
    SearchCeilingExceeded,
    TAlgebra,
    algebra_dumps,
    algebra_from_dict,
    algebra_morphism,
    canonical_structure,
    check_algebra,
    check_morphism,
    enumerate_algebras,
    free_algebra,
    iso_classes,
    morphism_witness,
)
from monadlab.finset import FinSet, FinSetError, Morphism, hom, identity
from monadlab.monadicity import function_algebra
from monadlab.statemonad import StateMonadCtx


class TestCheckAlgebra:
    def test_free_algebra_validates(self):
        for s in (1, 2):
            ctx = StateMonadCtx(s)
            for xn in range(3):
                alg = free_algebra(ctx, FinSet(xn))
                assert isinstance(alg, TAlgebra)
                assert alg.carrier == ctx.t_obj(FinSet(xn))

    def test_function_algebras_validate(self, ctx2):
        for yn in range(4):
            assert isinstance(function_algebra(ctx2, yn), TAlgebra)

    def test_constant_structure_fails_unit(self, ctx2):
        x = FinSet(2)
        h = Morphism(ctx2.t_obj(x), x, (0,) * 16)
        result = check_algebra(ctx2, x, h)
        assert isinstance(result, AlgebraViolation)
        assert result.law == "unit" and result.witness == 1

    def test_corrupted_structure_fails(self, ctx2, twelve):
        good = twelve[0]
        table = list(good.structure.table)
        table[7] = (table[7] + 1) % 4
        result = check_algebra(
            ctx2, good.carrier, Morphism(good.structure.dom, good.carrier, table)
        )
        assert isinstance(result, AlgebraViolation)

    def test_type_mismatch_rejected(self, ctx2):
        with pytest.raises(FinSetError):
            check_algebra(ctx2, FinSet(2), identity(2))

    def test_empty_state_unit_forces_singleton(self):
        ctx = StateMonadCtx(0)
        ok = check_algebra(ctx, FinSet(1), Morphism(FinSet(1), FinSet(1), (0,)))
        assert isinstance(ok, TAlgebra)
        bad = check_algebra(ctx, FinSet(2), Morphism(FinSet(1), FinSet(2), (0,)))
        assert isinstance(bad, AlgebraViolation) and bad.law == "unit"


class TestMorphisms:
    def test_identity_is_morphism(self, twelve):
        for alg in twelve:
            assert check_morphism(identity(alg.carrier), alg, alg)

    def test_composition_closed(self, ctx2, twelve):
        a, b = twelve[0], twelve[1]
        maps_ab = [
            u for u in hom(a.carrier, b.carrier) if check_morphism(u, a, b)
        ]
        maps_ba = [
            u for u in hom(b.carrier, a.carrier) if check_morphism(u, b, a)
        ]
        for u in maps_ab[:5]:
            for v in maps_ba[:5]:
                composite = u.then(v)
                assert check_morphism(composite, a, a)

    def test_hom_count_between_function_algebras(self, ctx2):
        # maps K(2) -> K(3) correspond exactly to maps 2 -> 3
        a = function_algebra(ctx2, 2)
        b = function_algebra(ctx2, 3)
        count = sum(
            1 for u in hom(a.carrier, b.carrier) if check_morphism(u, a, b)
        )
        assert count == 9

    def test_witness_reported(self, ctx2, twelve):
        a = twelve[0]
        bad = next(
            u
            for u in hom(a.carrier, a.carrier)
            if not check_morphism(u, a, a)
        )
        assert morphism_witness(bad, a, a) is not None
        with pytest.raises(FinSetError):
            algebra_morphism(bad, a, a)

    def test_validated_constructor(self, twelve):
        a = twelve[0]
        am = algebra_morphism(identity(a.carrier), a, a)
        assert am.map.table == identity(a.carrier).table

    def test_type_mismatch(self, ctx2, twelve):
        with pytest.raises(FinSetError):
            morphism_witness(identity(3), twelve[0], twelve[0])


class TestFreeAlgebra:
    def test_small_carriers(self, ctx1, ctx2):
        assert free_algebra(ctx1, FinSet(2)).carrier.size == 2
        assert free_algebra(ctx2, FinSet(1)).carrier.size == 4

    def test_free_on_point_appears_in_classification(self, ctx2, twelve):
        alg = free_algebra(ctx2, FinSet(1))
        assert alg.structure.table in [a.structure.table for a in twelve]

    def test_mult_is_morphism_from_double_free(self, ctx2):
        x = FinSet(1)
        free1 = free_algebra(ctx2, x)
        free2 = free_algebra(ctx2, ctx2.t_obj(x))
        assert check_morphism(ctx2.mult(x), free2, free1)


class TestEnumerate:
    def test_singleton_state_unique(self, ctx1):
        for xn in range(5):
            assert len(enumerate_algebras(ctx1, xn, method="brute")) == 1
            assert len(enumerate_algebras(ctx1, xn, method="constrained")) == 1

    def test_no_structures_on_two_with_two_states(self, ctx2):
        assert enumerate_algebras(ctx2, 2, method="brute") == []
        assert enumerate_algebras(ctx2, 2, method="constrained") == []

    def test_twelve_on_four_with_two_states(self, ctx2, twelve):
        cons = enumerate_algebras(ctx2, 4, method="constrained")
        assert len(twelve) == len(cons) == 12
        assert [a.structure.table for a in twelve] == [
            a.structure.table for a in cons
        ]

    def test_brute_equals_constrained_where_feasible(self):
        cases = [(1, 0), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1)]
        for s, xn in cases:
            ctx = StateMonadCtx(s)
            brute = enumerate_algebras(ctx, xn, method="brute")
            cons = enumerate_algebras(ctx, xn, method="constrained")
            assert [a.structure.table for a in brute] == [
                a.structure.table for a in cons
            ]

    def test_transport_on_non_power_is_empty(self, ctx2):
        assert enumerate_algebras(ctx2, 3, method="transport") == []

    def test_empty_carrier(self, ctx2):
        algebras = enumerate_algebras(ctx2, 0)
        assert len(algebras) == 1 and algebras[0].structure.table == ()

    def test_results_sorted(self, twelve):
        tables = [a.structure.table for a in twelve]
        assert tables == sorted(tables)

    def test_refuses_empty_state(self):
        with pytest.raises(FinSetError):
            enumerate_algebras(StateMonadCtx(0), 2)

    def test_unknown_method(self, ctx2):
        with pytest.raises(FinSetError):
            enumerate_algebras(ctx2, 2, method="magic")

    def test_brute_ceiling(self, ctx2):
        with pytest.raises(SearchCeilingExceeded):
            enumerate_algebras(ctx2, 4, method="brute")

    def test_constrained_instance_guard(self, ctx3):
        with pytest.raises(SearchCeilingExceeded):
            enumerate_algebras(ctx3, 2, method="constrained")

    def test_constrained_work_guard(self, ctx2):
        with pytest.raises(SearchCeilingExceeded):
            enumerate_algebras(ctx2, 5, method="constrained", ceiling=50_000)

    def test_transport_ceiling(self, ctx3):
        with pytest.raises(SearchCeilingExceeded):
            enumerate_algebras(ctx3, 8, method="transport")

    def test_bad_ceiling(self, ctx2):
        with pytest.raises(FinSetError):
            enumerate_algebras(ctx2, 2, ceiling=0)


class TestCardinalityClassification:
    def test_two_states_existence_pattern(self, ctx2, twelve):
        # structures exist exactly on perfect-square carriers
        counts = {
            xn: len(enumerate_algebras(ctx2, xn)) for xn in range(5)
        }
        assert counts == {0: 1, 1: 1, 2: 0, 3: 0, 4: 12}

    def test_two_states_larger_square_has_structure(self, ctx2):
        # carrier 9 = 3^2: the function algebra on 3 is a witness
        alg = function_algebra(ctx2, 3, validate=True)
        assert alg.carrier.size == 9

    def test_three_states_cube_has_structure(self, ctx3):
        alg = function_algebra(ctx3, 2, validate=True)
        assert alg.carrier.size == 8

    def test_count_matches_relabeling_conjecture(self, twelve):
        assert len(twelve) == factorial(4) // factorial(2)


class TestIsoClasses:
    def test_twelve_form_one_class(self, twelve):
        assert len(iso_classes(twelve)) == 1

    def test_canonical_form_is_invariant(self, twelve):
        forms = {canonical_structure(a) for a in twelve}
        assert len(forms) == 1


class TestSerialization:
    def test_roundtrip(self, twelve):
        alg = twelve[0]
        record = json.loads(algebra_dumps(alg))
        assert record["s_size"] == 2 and record["x_size"] == 4
        back = algebra_from_dict(record)
        assert back.structure.table == alg.structure.table

    def test_invalid_record_rejected(self):
        with pytest.raises(FinSetError):
            algebra_from_dict({"s_size": 2, "x_size": 2, "h": [0] * 16})
