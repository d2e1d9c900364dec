import random
from fractions import Fraction

import pytest

from qssbounds.prover import (
    cached_system,
    certificate_from_json_dict,
    certificate_to_json_dict,
    check_implied,
    lemma_suite,
    scheme_relation_instances,
    share_bound,
    staircase_chain_instances,
    theorem3_chain,
    verify_certificate,
)
from qssbounds.simplex import Certificate
from qssbounds.structures import (
    CapacityError,
    StructureError,
    csirmaz,
    from_minimal_sets,
    is_quantum,
    purify,
)

from helpers import qutrit_threshold_vector, random_quantum_structure

THRESHOLD23 = from_minimal_sets(3, [[1, 2], [1, 3], [2, 3]])
GAMMA4 = from_minimal_sets(4, [[1, 2], [1, 3], [2, 3, 4]])
GAMMA4_BAR = purify(GAMMA4)


class TestShareBound:
    def test_threshold_is_exactly_one(self):
        report = share_bound(THRESHOLD23, mode="pure", ineq="full")
        assert report.lp_value == 1
        assert report.rate_upper_bound == 1
        assert not report.purified

    def test_threshold_oracle_vector_attains_the_bound(self):
        # Independent upper bound: the qutrit scheme's entropy vector is
        # feasible with every share entropy equal to 1, so the exact LP
        # minimum of the largest share cannot exceed 1.
        system = cached_system(THRESHOLD23, True, "full")
        point = qutrit_threshold_vector(system.ground)
        for c in system.constraints:
            assert c.satisfied_by(point)
        assert max(point[1 << i] for i in range(3)) == 1
        assert share_bound(THRESHOLD23).lp_value == 1

    def test_purified_gamma4_at_least_three_halves(self):
        report = share_bound(GAMMA4_BAR, players=[1, 2, 3, 4])
        assert report.lp_value >= Fraction(3, 2)
        assert report.rate_upper_bound <= Fraction(2, 3)
        assert report.lp_value * report.rate_upper_bound == 1

    def test_csirmaz4_report_carries_reference(self):
        report = share_bound(GAMMA4, auto_purify=True)
        assert report.purified
        assert report.k == 2
        assert report.theorem3_bound == Fraction(7, 5)
        assert report.lp_value >= Fraction(7, 5)

    def test_non_csirmaz_has_no_reference(self):
        report = share_bound(THRESHOLD23)
        assert report.k is None and report.theorem3_bound is None

    def test_purify_then_bound_consistency(self):
        direct = share_bound(GAMMA4_BAR, players=[1, 2, 3, 4])
        auto = share_bound(GAMMA4, auto_purify=True, players=[1, 2, 3, 4])
        assert direct.lp_value == auto.lp_value

    def test_rejects_non_quantum(self):
        bad = from_minimal_sets(2, [[1], [2]])
        with pytest.raises(StructureError):
            share_bound(bad)

    def test_pure_needs_self_dual_or_flag(self):
        with pytest.raises(StructureError):
            share_bound(GAMMA4, auto_purify=False)

    def test_limit_guard(self):
        big, _ = csirmaz(9)
        with pytest.raises(CapacityError):
            share_bound(big, auto_purify=True)

    def test_single_objective(self):
        report = share_bound(THRESHOLD23, objective="single:2")
        assert report.objective.kind == "single"
        assert report.lp_value == 1

    def test_minsum_objective(self):
        report = share_bound(THRESHOLD23, objective="minsum")
        assert report.lp_value == 3

    def test_mixed_mode_runs_without_purity(self):
        report = share_bound(GAMMA4, mode="mixed")
        assert report.lp_value >= 1

    def test_empty_player_selection_rejected(self):
        with pytest.raises(StructureError):
            share_bound(THRESHOLD23, players=[])

    def test_objective_player_out_of_range(self):
        with pytest.raises(StructureError):
            share_bound(THRESHOLD23, players=[1, 9])

    def test_report_json_shape(self):
        report = share_bound(THRESHOLD23)
        data = report.to_json_dict()
        assert list(data) == [
            "structure", "purified", "k", "theorem3_bound", "mode", "ineq",
            "objective", "lp_value", "rate_upper_bound", "certificate", "stats",
        ]
        assert data["lp_value"] == "1/1"
        assert data["stats"]["rows"] > 0 and data["stats"]["cols"] == 17
        assert all(
            isinstance(e["mult"], str) and "/" in e["mult"]
            for e in data["certificate"]["entries"]
        )


class TestVerifyCertificate:
    def test_round_trip(self):
        report = share_bound(GAMMA4_BAR, players=[1, 2, 3, 4])
        system = cached_system(GAMMA4_BAR, True, "full")
        assert verify_certificate(system, report.certificate, objective=report.objective)

    def test_perturbed_multiplier_rejected(self):
        report = share_bound(THRESHOLD23)
        system = cached_system(THRESHOLD23, True, "full")
        rid, mult = report.certificate.entries[0]
        tampered = Certificate(
            report.certificate.claimed_bound,
            ((rid, mult + 1),) + report.certificate.entries[1:],
            report.certificate.objective,
        )
        assert not verify_certificate(system, tampered, objective=report.objective)

    def test_raised_claim_rejected(self):
        report = share_bound(THRESHOLD23)
        system = cached_system(THRESHOLD23, True, "full")
        greedy = Certificate(
            report.certificate.claimed_bound + Fraction(1, 7),
            report.certificate.entries,
            report.certificate.objective,
        )
        assert not verify_certificate(system, greedy, objective=report.objective)

    def test_unknown_id_raises(self):
        report = share_bound(THRESHOLD23)
        system = cached_system(THRESHOLD23, True, "full")
        bogus = Certificate(
            report.certificate.claimed_bound,
            (("nonsense:1", Fraction(1)),) + report.certificate.entries,
            report.certificate.objective,
        )
        with pytest.raises(KeyError):
            verify_certificate(system, bogus, objective=report.objective)

    def test_negative_multiplier_on_inequality_rejected(self):
        system = cached_system(THRESHOLD23, True, "full")
        some_ineq = next(c for c in system.constraints if c.rel == ">=")
        cert = Certificate(Fraction(0), ((some_ineq.id, Fraction(-1)),), ())
        assert not verify_certificate(
            system, cert, objective=[(v, -c) for v, c in some_ineq.terms]
        )

    def test_json_round_trip(self):
        report = share_bound(THRESHOLD23)
        data = certificate_to_json_dict(report.certificate)
        back = certificate_from_json_dict(data)
        assert back.entries == report.certificate.entries
        assert back.claimed_bound == report.certificate.claimed_bound


class TestCheckImplied:
    def test_lemma4_instance_on_gamma4_bar(self):
        system = cached_system(GAMMA4_BAR, True, "full")
        res = check_implied(
            system,
            {0b00111: Fraction(1), 0b01110: Fraction(1),
             0b01111: Fraction(-1), 0b00110: Fraction(-1)},
            ">=",
            Fraction(2),
        )
        assert res.implied
        assert len(res.certificates) == 1

    def test_complement_equality_for_authorized_sets(self):
        system = cached_system(GAMMA4_BAR, True, "full")
        res = check_implied(
            system, {0b00011: Fraction(1), 0b11100: Fraction(-1)}, "=", Fraction(1)
        )
        assert res.implied
        assert len(res.certificates) == 2

    def test_refutation_returns_valid_witness(self):
        system = cached_system(GAMMA4_BAR, True, "full")
        res = check_implied(system, {0b00001: Fraction(1)}, ">=", Fraction(2))
        assert not res.implied
        assert res.witness is not None
        assert res.witness[0b00001] < 2
        for c in system.constraints:
            assert c.satisfied_by(res.witness)

    def test_unbounded_direction_still_yields_witness(self):
        system = cached_system(THRESHOLD23, True, "full")
        res = check_implied(system, {0b0001: Fraction(-1)}, ">=", Fraction(0))
        assert not res.implied
        assert res.witness is not None
        assert res.witness[0b0001] > 0

    def test_fast_path_certificates_replay_on_full_system(self):
        system = cached_system(GAMMA4_BAR, True, "full")
        res = check_implied(
            system, {0b00011: Fraction(1), 0b11100: Fraction(-1)}, "=", Fraction(1)
        )
        for cert in res.certificates:
            assert verify_certificate(system, cert, objective=cert.objective)

    def test_accepts_term_pairs_as_target(self):
        system = cached_system(THRESHOLD23, True, "full")
        res = check_implied(system, ((0b0001, Fraction(1)),), ">=", Fraction(1))
        assert res.implied

    def test_fast_path_agrees_with_slow_path(self):
        system = cached_system(THRESHOLD23, True, "full")
        targets = [
            ({0b0001: Fraction(1)}, ">=", Fraction(1)),
            ({0b0011: Fraction(1), 0b0001: Fraction(-1)}, ">=", Fraction(0)),
            ({0b0111: Fraction(1)}, "=", Fraction(1)),
            ({0b0001: Fraction(1)}, ">=", Fraction(2)),
        ]
        for terms, rel, rhs in targets:
            fast = check_implied(system, dict(terms), rel, rhs, use_fast_path=True)
            slow = check_implied(system, dict(terms), rel, rhs, use_fast_path=False)
            assert fast.implied == slow.implied


class TestSuites:
    def test_threshold_suite_all_implied(self):
        report = lemma_suite(THRESHOLD23)
        assert report.all_implied
        assert len(report.outcomes) > 15
        kinds = {o.instance.id.split(":")[0] for o in report.outcomes}
        assert kinds == {"joint1", "joint2", "joint3", "withref", "gap"}

    def test_suite_requires_self_dual(self):
        with pytest.raises(StructureError):
            lemma_suite(GAMMA4)

    def test_instance_counts_threshold(self):
        system = cached_system(THRESHOLD23, True, "full")
        instances = scheme_relation_instances(THRESHOLD23, system.ground)
        authorized = [m for m in range(1, 8) if THRESHOLD23.mask_authorized(m)]
        assert len(authorized) == 4  # three pairs and the full set
        ids = [i.id for i in instances]
        assert sum(i.startswith("joint") for i in ids) == 3 * len(authorized)
        assert sum(i.startswith("withref") for i in ids) == 7
        assert sum(i.startswith("gap") for i in ids) == 3  # pairs with single meet

    def test_full_set_relation_consistent_with_purity(self):
        system = cached_system(THRESHOLD23, True, "full")
        instances = {i.id: i for i in scheme_relation_instances(THRESHOLD23, system.ground)}
        full_rel = instances["joint3:1,2,3"]
        assert full_rel.terms == ((0b0111, Fraction(1)),)
        assert full_rel.rhs == 1

    def test_suite_json(self):
        report = lemma_suite(THRESHOLD23)
        data = report.to_json_dict()
        assert data["all_implied"] is True
        assert data["total"] == len(report.outcomes)
        assert data["implied"] == data["total"]


class TestChain:
    def test_chain_instances_n4(self):
        purified, k, instances = staircase_chain_instances(4)
        assert purified == GAMMA4_BAR
        assert k == 2
        ids = [i.id for i in instances]
        assert ids == ["step:0", "step:1", "telescoped", "final"]
        final = instances[-1]
        assert final.terms == ((0b00011, Fraction(2)), (0b10000, Fraction(1)))
        assert final.rhs == 7
        step0 = instances[0]
        assert step0.terms == (
            (0b00011, Fraction(1)), (0b00100, Fraction(1)), (0b00111, Fraction(-1)),
        )
        assert step0.rhs == 2

    def test_chain_n4(self):
        report = theorem3_chain(4)
        assert report.k == 2
        assert report.reference_bound == Fraction(7, 5)
        assert report.all_implied
        assert report.bound.lp_value >= Fraction(7, 5)
        data = report.to_json_dict()
        assert data["theorem3_bound"] == "7/5"
        assert data["all_implied"] is True

    def test_chain_n5(self):
        # no independent ground truth here; the chain itself is the check
        report = theorem3_chain(5)
        assert report.k == 2
        assert report.all_implied
        assert report.bound.lp_value >= report.reference_bound

    def test_chain_limit_guard(self):
        with pytest.raises(CapacityError):
            theorem3_chain(9)


class TestFloorProperty:
    def test_random_structures_bounded_below_by_one(self):
        rng = random.Random(555)
        for _ in range(8):
            s = random_quantum_structure(rng, rng.randint(2, 4))
            report = share_bound(s, auto_purify=True)
            assert report.lp_value >= 1

    def test_exhaustive_small_structures_bounded_below_by_one(self):
        # every quantum structure on up to three players
        from test_structures import all_antichain_structures

        checked = 0
        for n in (1, 2, 3):
            for s in all_antichain_structures(n):
                if not is_quantum(s):
                    continue
                report = share_bound(s, auto_purify=True)
                assert report.lp_value >= 1, s
                checked += 1
        assert checked > 10


class TestModeEquality:
    def test_random_self_dual_structures_agree_across_modes(self):
        rng = random.Random(777)
        seen = set()
        while len(seen) < 6:
            s = purify(random_quantum_structure(rng, rng.randint(2, 4)))
            if s in seen:
                continue
            seen.add(s)
            full = share_bound(s, ineq="full")
            elemental = share_bound(s, ineq="elemental")
            assert full.lp_value == elemental.lp_value


class TestElementalSpansFullCone:
    def test_sampled_full_rows_implied_by_elemental_system(self):
        # Every full-mode inequality must be a nonnegative combination of
        # the elemental ones; spot-check by implication on a sample.
        rng = random.Random(31337)
        elemental = cached_system(THRESHOLD23, True, "elemental")
        full = cached_system(THRESHOLD23, True, "full")
        candidates = [c for c in full.constraints if c.family in ("ssa", "wm")]
        for c in rng.sample(candidates, 25):
            res = check_implied(
                elemental, c.terms_dict(), ">=", c.rhs, use_fast_path=False
            )
            assert res.implied, c.id
