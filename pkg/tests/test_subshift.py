import json
import math
from fractions import Fraction

import pytest

import oracles
from ordrank import subshift as sub
from ordrank.ordinals import ONE, format_ordinal
from ordrank.relations import RelationDomain

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


def fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


class TestParsing:
    def test_golden_mean_graph(self, golden_mean):
        graph = sub.build_graph(golden_mean)
        assert len(graph.states) == 2
        assert sum(len(e) for e in graph.edges) == 3

    def test_full_shift_graph(self, full_shift):
        graph = sub.build_graph(full_shift)
        assert len(graph.states) == 2
        assert sum(len(e) for e in graph.edges) == 4

    def test_empty_subshift_rejected(self):
        text = json.dumps(
            {"type": "sft", "alphabet": ["0", "1"], "forbidden": ["0", "1"]}
        )
        with pytest.raises(sub.EmptySubshiftError, match="empty subshift"):
            sub.parse_subshift(text)

    def test_parse_round_trip(self, golden_mean):
        text = json.dumps(
            {"type": "sft", "alphabet": ["0", "1"], "forbidden": ["11"]}
        )
        assert sub.parse_subshift(text) == golden_mean

    @pytest.mark.parametrize(
        "payload, path",
        [
            ({"type": "nope"}, "/type"),
            ({"type": "sft", "alphabet": [], "forbidden": []}, "/alphabet"),
            ({"type": "sft", "alphabet": ["ab"], "forbidden": []}, "/alphabet/0"),
            ({"type": "sft", "alphabet": ["0"], "forbidden": ["1"]}, "/forbidden/0"),
            ({"type": "sft", "alphabet": ["0"], "forbidden": [""]}, "/forbidden/0"),
            ({"type": "sft", "alphabet": ["0"], "forbidden": [], "x": 1}, "/x"),
        ],
    )
    def test_malformed_specs_name_the_field(self, payload, path):
        with pytest.raises(sub.SubshiftInputError) as err:
            sub.spec_from_dict(payload)
        assert err.value.path == path

    def test_longer_forbidden_words_raise_the_order(self):
        spec = sub.SubshiftSpec(alphabet=("0", "1"), forbidden=("101",))
        graph = sub.build_graph(spec)
        assert graph.order == 2
        assert all(len(s) == 2 for s in graph.states)


class TestCountWords:
    def test_full_shift_powers(self, full_shift):
        for n in range(1, 10):
            assert sub.count_words(full_shift, n) == 2 ** n

    def test_golden_mean_fibonacci(self, golden_mean):
        for n in range(1, 16):
            assert sub.count_words(golden_mean, n) == fib(n + 2)
        for n in range(3, 16):
            assert sub.count_words(golden_mean, n) == sub.count_words(
                golden_mean, n - 1
            ) + sub.count_words(golden_mean, n - 2)

    def test_forbid_01_linear(self, forbid_01):
        for n in range(1, 12):
            assert sub.count_words(forbid_01, n) == n + 1

    def test_against_brute_enumeration(self, golden_mean, forbid_01):
        for spec in (golden_mean, forbid_01):
            for n in range(1, 10):
                expected = oracles.brute_extendable(spec.alphabet, spec.forbidden, n)
                assert sub.enumerate_words(spec, n) == sorted(expected)
                assert sub.count_words(spec, n) == len(expected)

    def test_extendability_matters(self):
        # "1" begins no infinite sequence when every 1 must be final
        spec = sub.SubshiftSpec(alphabet=("0", "1"), forbidden=("10", "11"))
        assert sub.enumerate_words(spec, 1) == ["0"]
        expected = oracles.brute_extendable(spec.alphabet, spec.forbidden, 3)
        assert sub.enumerate_words(spec, 3) == sorted(expected)


class TestEntropy:
    def test_full_shift_exact(self, full_shift):
        for n in range(1, 21):
            assert sub.entropy_estimate(full_shift, n) == pytest.approx(
                math.log(2), abs=1e-12
            )
        assert sub.entropy_spectral(full_shift) == pytest.approx(
            math.log(2), abs=1e-9
        )

    def test_golden_mean_spectral(self, golden_mean):
        assert sub.entropy_spectral(golden_mean) == pytest.approx(
            math.log(GOLDEN_RATIO), abs=1e-6
        )

    def test_forbid_01_zero_entropy(self, forbid_01):
        assert sub.entropy_spectral(forbid_01) == pytest.approx(0.0, abs=1e-9)
        assert sub.entropy_estimate(forbid_01, 20) == pytest.approx(
            math.log(21) / 20, abs=1e-12
        )

    def test_estimate_matches_count_exactly(self, golden_mean):
        n = 20
        assert sub.entropy_estimate(golden_mean, n) * n == pytest.approx(
            math.log(sub.count_words(golden_mean, n)), abs=0
        )

    def test_spectral_approaches_estimates(self, full_shift, golden_mean):
        for spec in (full_shift, golden_mean):
            spectral = sub.entropy_spectral(spec, tol=1e-12)
            estimate = sub.entropy_estimate(spec, 20)
            assert abs(estimate - spectral) < 0.05


class TestRealizable:
    def test_examples(self, golden_mean, forbid_01):
        assert sub.realizable(golden_mean, [(0, "1"), (2, "1")])
        assert not sub.realizable(golden_mean, [(0, "1"), (1, "1")])
        assert not sub.realizable(forbid_01, [(0, "0"), (2, "1")])

    def test_overlap_conflicts(self, full_shift):
        assert not sub.realizable(full_shift, [(0, "01"), (1, "00")])
        assert sub.realizable(full_shift, [(0, "01"), (1, "10")])

    def test_no_constraints(self, golden_mean):
        assert sub.realizable(golden_mean, [])

    def test_against_brute_oracle(self, golden_mean, forbid_01):
        import random

        rng = random.Random(77)
        for spec in (golden_mean, forbid_01):
            for _ in range(120):
                constraints = []
                for _ in range(rng.randint(1, 3)):
                    pos = rng.randrange(0, 7)
                    length = rng.randint(1, 2)
                    word = "".join(
                        rng.choice(spec.alphabet) for _ in range(length)
                    )
                    constraints.append((pos, word))
                expected = oracles.brute_realizable(
                    spec.alphabet, spec.forbidden, constraints
                )
                assert sub.realizable(spec, constraints) == expected, constraints


class TestIndependence:
    def test_full_shift_any_positions(self, full_shift):
        assert sub.is_independent(full_shift, "0", "1", [0, 1, 2, 5, 7])

    def test_golden_examples(self, golden_mean):
        assert not sub.is_independent(golden_mean, "0", "1", [0, 1])
        assert sub.is_independent(golden_mean, "0", "1", [0, 2])

    def test_forbid_01_two_positions_all_refuted(self, forbid_01):
        for j in range(8):
            for k in range(j + 1, 8):
                assert not sub.is_independent(forbid_01, "0", "1", [j, k])
                assert not oracles.brute_independent(
                    forbid_01.alphabet, forbid_01.forbidden, "0", "1", [j, k]
                )

    def test_against_brute_oracle(self, golden_mean):
        for j in range(5):
            for k in range(j + 1, 6):
                expected = oracles.brute_independent(
                    golden_mean.alphabet, golden_mean.forbidden, "0", "1", [j, k]
                )
                assert sub.is_independent(golden_mean, "0", "1", [j, k]) == expected


class TestFindIndependenceSet:
    def test_full_shift_density_one(self, full_shift):
        cert = sub.find_independence_set(full_shift, "0", "1", 8, 1)
        assert cert is not None
        assert cert.positions == tuple(range(8))
        assert cert.density == Fraction(1)

    def test_golden_even_positions(self, golden_mean):
        cert = sub.find_independence_set(golden_mean, "0", "1", 8, "0.5")
        assert cert is not None
        assert cert.positions == (0, 2, 4, 6)
        assert cert.density == Fraction(1, 2)

    def test_forbid_01_none_beyond_singletons(self, forbid_01):
        # any target of two or more positions is exhaustively refuted
        assert sub.find_independence_set(forbid_01, "0", "1", 8, "0.5") is None
        assert sub.find_independence_set(forbid_01, "0", "1", 8, "0.25") is None

    def test_certificate_reverifies(self, golden_mean):
        cert = sub.find_independence_set(golden_mean, "0", "1", 8, "0.5")
        for choice in range(2 ** len(cert.positions)):
            constraints = [
                (j, cert.u if choice >> i & 1 else cert.v)
                for i, j in enumerate(cert.positions)
            ]
            assert sub.realizable(golden_mean, constraints)

    def test_tampered_certificate_rejected(self, golden_mean):
        with pytest.raises(ValueError, match="does not verify"):
            sub.IndependenceCertificate(
                spec=golden_mean, u="0", v="1", horizon=8, positions=(0, 1)
            )

    def test_node_budget_reports_unknown(self, golden_mean):
        status, cert = sub.independence_status(
            golden_mean, "0", "1", 8, "0.5", node_budget=1
        )
        assert status == "unknown"
        assert cert is None


class TestIERelation:
    def test_full_shift_all_four_pairs(self, full_shift):
        lower, upper = sub.ie_relation(full_shift, 1, 8, 1)
        assert lower.pair_count == 4
        assert upper.pair_count == 4

    def test_forbid_01_upper_excludes_mixed_pairs(self, forbid_01):
        lower, upper = sub.ie_relation(forbid_01, 1, 8, "0.5")
        assert not upper.has("0", "1")
        assert not upper.has("1", "0")
        assert upper.has("0", "0")
        assert upper.has("1", "1")

    def test_lower_contained_in_upper(self, golden_mean, full_shift, forbid_01):
        for spec in (golden_mean, full_shift, forbid_01):
            for n in (1, 2):
                lower, upper = sub.ie_relation(spec, n, 6, "0.5")
                assert RelationDomain(lower.space).leq(lower, upper)

    def test_symmetric(self, golden_mean):
        lower, upper = sub.ie_relation(golden_mean, 2, 8, "0.5")
        for r in (lower, upper):
            for u, v in r.pairs():
                assert r.has(v, u)

    def test_monotone_evidence_in_horizon(self, golden_mean, full_shift, forbid_01):
        """Growing the horizon never shrinks lower and never grows upper."""
        for spec in (golden_mean, full_shift, forbid_01):
            previous = None
            for horizon in (4, 6, 8):
                lower, upper = sub.ie_relation(spec, 1, horizon, "0.5")
                if previous is not None:
                    prev_lower, prev_upper = previous
                    domain = RelationDomain(lower.space)
                    assert domain.leq(prev_lower, lower)
                    assert domain.leq(upper, prev_upper)
                previous = (lower, upper)


class TestEntropyRankReport:
    def test_full_shift_consistent(self, full_shift):
        report = sub.entropy_rank_report(full_shift, 2, 8, 1, 16)
        assert report.verdict == sub.VERDICT_CONSISTENT
        for level in report.levels:
            assert level.lower_reach_top and level.upper_reach_top
            assert format_ordinal(level.stabilization_stage) == "1"

    def test_golden_mean_consistent(self, golden_mean):
        report = sub.entropy_rank_report(golden_mean, 2, 8, "0.5", 16)
        assert report.verdict == sub.VERDICT_CONSISTENT
        assert all(
            level.stabilization_stage == ONE for level in report.levels
        )

    def test_forbid_01_certified_not_cpe(self, forbid_01):
        report = sub.entropy_rank_report(forbid_01, 2, 8, "0.5", 16)
        assert report.verdict == sub.VERDICT_NOT_CPE
        assert report.levels[0].upper_reach_top is False

    def test_diagonal_pairs_flagged(self, golden_mean):
        report = sub.entropy_rank_report(golden_mean, 1, 8, "0.5", 16)
        assert report.levels[0].diagonal_certified == ("0", "1")

    def test_budget_exhaustion_indeterminate(self, golden_mean):
        report = sub.entropy_rank_report(golden_mean, 1, 8, "0.5", 1)
        assert report.verdict == sub.VERDICT_INDETERMINATE
        assert report.levels[0].budget_exhausted

    def test_parameters_ride_along(self, golden_mean):
        report = sub.entropy_rank_report(golden_mean, 2, 8, "0.5", 16)
        assert (report.n_max, report.horizon, report.budget) == (2, 8, 16)
        assert report.density == Fraction(1, 2)
