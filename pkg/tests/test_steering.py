"""Distribution distance, intervention edits, and plan recommendation."""

import json
import random

import numpy as np
import pytest

from rolecycle import (
    N_ROLES,
    ROLE_INDEX,
    ROLE_ORDER,
    TAG_MASKED,
    DistributionVector,
    EmptyCatalog,
    InterventionSpec,
    InvalidConfig,
    InvalidEdit,
    InvalidMatrix,
    Role,
    TargetDistribution,
    TransitionMatrix,
    apply_intervention,
    apply_plan,
    catalog_to_json,
    distance,
    estimate_transition_matrix,
    load_catalog,
    plans_to_json,
    project_distribution,
    recommend,
)

V, N, A, L, P, T, D = ROLE_ORDER


def _dist(**shares):
    raw = {r.value: 0.0 for r in ROLE_ORDER}
    for name, v in shares.items():
        raw[name.capitalize()] = v
    return DistributionVector.from_dict(raw)


def _matrix_of(rows):
    arr = np.zeros((N_ROLES, N_ROLES))
    for frm, row in rows.items():
        for to, p in row.items():
            arr[ROLE_INDEX[frm], ROLE_INDEX[to]] = p
    for i in range(N_ROLES):
        if arr[i].sum() == 0.0:
            arr[i, i] = 1.0
    return TransitionMatrix(arr, TAG_MASKED)


class TestDistance:
    def test_zero_on_identical(self):
        d = _dist(active=0.5, passive=0.5)
        assert distance(d, d) == 0.0

    def test_disjoint_mass_is_one(self):
        assert distance(_dist(visitor=1.0), _dist(departed=1.0)) == 1.0

    def test_hand_computed_quarter(self):
        a = _dist(visitor=0.5, novice=0.5)
        b = _dist(visitor=0.25, novice=0.75)
        assert distance(a, b) == 0.25

    def test_symmetry(self):
        a = _dist(active=0.7, passive=0.3)
        b = _dist(active=0.2, passive=0.5, departed=0.3)
        assert distance(a, b) == distance(b, a)


class TestTargetDistribution:
    def test_tolerance_validation(self):
        with pytest.raises(InvalidConfig):
            TargetDistribution(_dist(active=1.0), tolerance=(0.1,) * 3)
        with pytest.raises(InvalidConfig):
            TargetDistribution(_dist(active=1.0), tolerance=(-0.1,) * N_ROLES)

    def test_within_tolerance(self):
        t = TargetDistribution(_dist(active=0.5, passive=0.5), tolerance=(0.3,) * N_ROLES)
        flags = t.within_tolerance(_dist(active=0.4, passive=0.6))
        assert all(flags)

    def test_json_round_trip(self):
        t = TargetDistribution(
            _dist(active=0.6, passive=0.4),
            tolerance=tuple(0.05 if r is A else 0.0 for r in ROLE_ORDER),
        )
        again = TargetDistribution.from_json(t.to_json())
        assert np.allclose(again.distribution.data, t.distribution.data, atol=1e-15)
        assert again.tolerance == t.tolerance

    def test_bare_mapping_accepted(self):
        t = TargetDistribution.from_json('{"Active": 0.5, "Passive": 0.5}')
        assert t.distribution[A] == 0.5
        assert t.tolerance == (0.0,) * N_ROLES

    def test_unknown_keys_rejected(self):
        with pytest.raises(InvalidConfig):
            TargetDistribution.from_json(
                '{"distribution": {"Active": 1.0}, "bogus": 1}'
            )


class TestInterventionSpec:
    def test_disallowed_edit_rejected_at_construction(self):
        with pytest.raises(InvalidEdit, match="disallowed transition"):
            InterventionSpec(
                id="bad", label="", edits=((Role.TROLL, Role.ACTIVE, 2.0),)
            )

    def test_nonpositive_multiplier_rejected(self):
        with pytest.raises(InvalidEdit):
            InterventionSpec(id="x", label="", edits=((A, P, 0.0),))

    def test_empty_edits_rejected(self):
        with pytest.raises(InvalidEdit):
            InterventionSpec(id="x", label="", edits=())

    def test_negative_cost_rejected(self):
        with pytest.raises(InvalidConfig):
            InterventionSpec(id="x", label="", edits=((A, P, 2.0),), cost=-1.0)

    def test_dict_round_trip(self):
        spec = InterventionSpec(
            id="reactivate",
            label="Reactivation campaign",
            edits=((P, A, 2.0), (P, D, 0.5)),
            cost=3.0,
        )
        again = InterventionSpec.from_dict(spec.to_dict())
        assert again == spec

    def test_unknown_keys_rejected(self):
        with pytest.raises(InvalidConfig):
            InterventionSpec.from_dict({"id": "x", "edits": [], "speed": 9})


class TestCatalogIo:
    def _catalog(self):
        return [
            InterventionSpec(id="a", label="A", edits=((P, A, 2.0),), cost=1.0),
            InterventionSpec(id="b", label="B", edits=((A, L, 1.5),), cost=2.0),
        ]

    def test_round_trip(self):
        text = catalog_to_json(self._catalog())
        assert load_catalog(text) == self._catalog()

    def test_duplicate_ids_rejected(self):
        items = json.loads(catalog_to_json(self._catalog()))
        items[1]["id"] = "a"
        with pytest.raises(InvalidConfig, match="unique"):
            load_catalog(json.dumps(items))

    def test_non_list_rejected(self):
        with pytest.raises(InvalidConfig):
            load_catalog('{"id": "a"}')


class TestApplyIntervention:
    def test_hand_computed_renormalization(self):
        # Active row {A:.6, P:.3, L:.1}; doubling A->L scales the row by 1.1.
        m = _matrix_of({A: {A: 0.6, P: 0.3, L: 0.1}})
        spec = InterventionSpec(id="s", label="", edits=((A, L, 2.0),))
        out = apply_intervention(m, spec)
        assert out[A, A] == pytest.approx(0.6 / 1.1, abs=1e-15)
        assert out[A, P] == pytest.approx(0.3 / 1.1, abs=1e-15)
        assert out[A, L] == pytest.approx(0.2 / 1.1, abs=1e-15)

    def test_multiplier_one_is_identity(self):
        m = _matrix_of({A: {A: 0.6, P: 0.3, L: 0.1}})
        spec = InterventionSpec(id="s", label="", edits=((A, L, 1.0),))
        assert np.array_equal(apply_intervention(m, spec).data, m.data)

    def test_untouched_rows_bit_identical(self):
        m = estimate_transition_matrix(
            [[V, N, A, A, L, L, P, A, D], [V, V, N, P, P, A]]
        )
        spec = InterventionSpec(id="s", label="", edits=((A, L, 3.0),))
        out = apply_intervention(m, spec)
        i_active = ROLE_INDEX[A]
        for i in range(N_ROLES):
            if i != i_active:
                assert np.array_equal(out.data[i], m.data[i])

    def test_zero_cells_stay_zero(self):
        m = _matrix_of({A: {A: 1.0}})
        spec = InterventionSpec(id="s", label="", edits=((A, L, 5.0),))
        out = apply_intervention(m, spec)
        assert out[A, L] == 0.0
        assert out[A, A] == 1.0

    def test_rows_stay_stochastic(self):
        m = estimate_transition_matrix([[V, N, A, L, P, A, A, D]])
        spec = InterventionSpec(
            id="s", label="", edits=((A, L, 4.0), (V, N, 0.25))
        )
        out = apply_intervention(m, spec)
        assert np.all(np.abs(out.data.sum(axis=1) - 1.0) <= 1e-12)

    def test_requires_masked_matrix(self):
        raw = estimate_transition_matrix([[A, A]], masked=False)
        spec = InterventionSpec(id="s", label="", edits=((A, L, 2.0),))
        with pytest.raises(InvalidMatrix):
            apply_intervention(raw, spec)

    def test_plan_applies_in_sequence(self):
        m = _matrix_of({A: {A: 0.5, P: 0.25, L: 0.25}})
        s1 = InterventionSpec(id="s1", label="", edits=((A, L, 2.0),))
        s2 = InterventionSpec(id="s2", label="", edits=((A, P, 2.0),))
        assert apply_plan(m, [s1, s2]) == apply_intervention(
            apply_intervention(m, s1), s2
        )


def _demo_matrix():
    return _matrix_of(
        {
            V: {V: 0.3, N: 0.6, D: 0.1},
            N: {N: 0.2, A: 0.5, P: 0.2, D: 0.1},
            A: {A: 0.6, L: 0.1, P: 0.2, D: 0.1},
            L: {L: 0.7, A: 0.2, P: 0.1},
            P: {P: 0.7, A: 0.1, D: 0.2},
            T: {T: 0.5, D: 0.5},
        }
    )


def _demo_catalog():
    return [
        InterventionSpec(id="mentor", label="", edits=((N, A, 2.0),), cost=2.0),
        InterventionSpec(id="reactivate", label="", edits=((P, A, 2.0),), cost=1.0),
        InterventionSpec(id="retain", label="", edits=((A, D, 0.5),), cost=1.5),
    ]


class TestRecommend:
    def test_catalog_of_three_yields_seven_plans(self):
        plans = recommend(
            _dist(active=0.5, passive=0.5),
            _demo_matrix(),
            TargetDistribution(_dist(active=0.8, passive=0.2)),
            _demo_catalog(),
            horizon=4,
            max_plan_len=2,
        )
        assert len(plans) == 7
        sizes = sorted(len(p.intervention_ids) for p in plans)
        assert sizes == [0, 1, 1, 1, 2, 2, 2]

    def test_exact_target_ranks_empty_plan_first(self):
        current = _dist(active=0.5, passive=0.5)
        m = _demo_matrix()
        reachable = project_distribution(current, m, 3)
        plans = recommend(
            current,
            m,
            TargetDistribution(reachable),
            _demo_catalog(),
            horizon=3,
        )
        assert plans[0].intervention_ids == ()
        assert plans[0].residual == 0.0

    def test_top_plan_never_worse_than_empty(self):
        plans = recommend(
            _dist(passive=0.9, active=0.1),
            _demo_matrix(),
            TargetDistribution(_dist(active=0.7, leader=0.3)),
            _demo_catalog(),
            horizon=6,
        )
        empty = next(p for p in plans if p.intervention_ids == ())
        assert plans[0].residual <= empty.residual

    def test_residual_recomputes_from_payload(self):
        target = TargetDistribution(_dist(active=0.7, leader=0.3))
        plans = recommend(
            _dist(passive=0.9, active=0.1),
            _demo_matrix(),
            target,
            _demo_catalog(),
            horizon=5,
        )
        for p in plans:
            assert distance(p.projected, target.distribution) == pytest.approx(
                p.residual, abs=1e-12
            )

    def test_catalog_order_does_not_matter(self):
        rng = random.Random(3)
        target = TargetDistribution(_dist(active=0.7, passive=0.3))
        current = _dist(passive=0.8, active=0.2)
        base = recommend(current, _demo_matrix(), target, _demo_catalog(), horizon=4)
        shuffled = _demo_catalog()
        rng.shuffle(shuffled)
        again = recommend(current, _demo_matrix(), target, shuffled, horizon=4)
        assert [p.intervention_ids for p in base] == [
            p.intervention_ids for p in again
        ]
        for p, q in zip(base, again):
            assert p.residual == pytest.approx(q.residual, abs=1e-12)

    def test_cost_breaks_residual_ties(self):
        # Two interventions with identical edits but different costs.
        same_edit = ((P, A, 2.0),)
        catalog = [
            InterventionSpec(id="pricey", label="", edits=same_edit, cost=9.0),
            InterventionSpec(id="cheap", label="", edits=same_edit, cost=1.0),
        ]
        plans = recommend(
            _dist(passive=1.0),
            _demo_matrix(),
            TargetDistribution(_dist(active=1.0)),
            catalog,
            horizon=3,
            max_plan_len=1,
        )
        singletons = [p for p in plans if len(p.intervention_ids) == 1]
        assert singletons[0].intervention_ids == ("cheap",)

    def test_greedy_matches_exhaustive_on_dominating_chain(self):
        # A 2-role chain where boosting P->A strictly dominates damping A->D.
        m = _matrix_of({A: {A: 0.7, P: 0.2, D: 0.1}, P: {P: 0.5, A: 0.5}})
        catalog = [
            InterventionSpec(id="boost", label="", edits=((P, A, 4.0),)),
            InterventionSpec(id="damp", label="", edits=((A, D, 0.9),)),
        ]
        current = _dist(active=0.3, passive=0.7)
        target = TargetDistribution(_dist(active=1.0))
        top_greedy = recommend(
            current, m, target, catalog, horizon=5, strategy="greedy"
        )[0]
        top_exhaustive = recommend(
            current, m, target, catalog, horizon=5, strategy="exhaustive"
        )[0]
        assert top_greedy.intervention_ids == top_exhaustive.intervention_ids
        assert top_greedy.residual == pytest.approx(
            top_exhaustive.residual, abs=1e-12
        )

    def test_empty_catalog_rejected(self):
        with pytest.raises(EmptyCatalog):
            recommend(
                _dist(active=1.0),
                _demo_matrix(),
                TargetDistribution(_dist(active=1.0)),
                [],
                horizon=1,
            )

    def test_parameter_validation(self):
        args = (
            _dist(active=1.0),
            _demo_matrix(),
            TargetDistribution(_dist(active=1.0)),
            _demo_catalog(),
        )
        with pytest.raises(ValueError):
            recommend(*args, horizon=0)
        with pytest.raises(ValueError):
            recommend(*args, horizon=1, max_plan_len=0)
        with pytest.raises(ValueError):
            recommend(*args, horizon=1, strategy="oracle")

    def test_plans_json_shape(self):
        plans = recommend(
            _dist(active=0.5, passive=0.5),
            _demo_matrix(),
            TargetDistribution(_dist(active=0.8, passive=0.2)),
            _demo_catalog(),
            horizon=2,
            max_plan_len=1,
        )
        payload = json.loads(plans_to_json(plans))
        assert len(payload) == len(plans)
        first = payload[0]
        assert set(first) == {
            "interventions",
            "horizon",
            "projected",
            "residual",
            "total_cost",
            "within_tolerance",
        }
        assert set(first["projected"]) == {r.value for r in ROLE_ORDER}

    def test_within_tolerance_flags_present(self):
        target = TargetDistribution(
            _dist(active=0.5, passive=0.5), tolerance=(1.0,) * N_ROLES
        )
        plans = recommend(
            _dist(active=0.5, passive=0.5),
            _demo_matrix(),
            target,
            _demo_catalog(),
            horizon=1,
            max_plan_len=1,
        )
        assert all(all(p.within_tolerance) for p in plans)
