import math

import numpy as np
import pytest

from qgi import (HONEST, AdversaryStrategy, Attack, CountingConfig, DataTable,
                 GridConfig, ProtocolTranscript, Scene, Verdict,
                 build_preparation, classical_intersect, comm_cost,
                 detection_probability, leakage_report, rasterize,
                 run_protocol)
from qgi.protocol import AliceParty, BobParty, StepRecord


class TestHonestRuns:
    def test_worked_example_intersects(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        assert transcript.verdict is Verdict.INTERSECT
        assert transcript.estimate.t_rounded == 1
        check = next(r for r in transcript.steps
                     if r.action == "uncompute_and_check")
        assert check.detail["pass_probability"] == 1.0
        assert check.detail["passed"] is True

    def test_disjoint_scenes(self, grid4):
        transcript = run_protocol(Scene(grid4, cells=(1, 2)),
                                  Scene(grid4, cells=(3, 4)))
        assert transcript.verdict is Verdict.DISJOINT
        assert transcript.estimate.t_rounded == 0

    def test_transcript_message_sizes_match_layouts(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        sent = {r.step: r.qubits_sent for r in transcript.steps
                if r.qubits_sent is not None}
        cost = transcript.cost
        assert sent[1] == cost.alice_to_bob_qubits == 6
        assert sent[2] == cost.bob_to_alice_qubits == 12

    def test_transcript_has_all_five_steps(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        assert {r.step for r in transcript.steps} == {1, 2, 3, 4, 5}
        transcript.validate()
        doc = transcript.to_dict()
        assert doc["verdict"] == "INTERSECT"
        assert doc["complete"] is True

    def test_sample_mode_reproducible(self, worked_scenes):
        cfg = CountingConfig(mode="sample", seed=11)
        one = run_protocol(*worked_scenes, cfg=cfg, seed=11)
        two = run_protocol(*worked_scenes, cfg=cfg, seed=11)
        assert one.to_dict() == two.to_dict()

    def test_mismatched_grids_rejected(self, grid4):
        other = Scene(GridConfig(2, 2), cells=(1,))
        with pytest.raises(ValueError, match="share one grid"):
            run_protocol(Scene(grid4, cells=(1,)), other)

    def test_soundness_on_random_small_scenes(self, grid4, rng):
        for _ in range(30):
            size_a, size_b = rng.integers(1, 5, size=2)
            cells_a = tuple(sorted(int(c) for c in
                            rng.choice(np.arange(1, 16), size_a, replace=False)))
            cells_b = tuple(sorted(int(c) for c in
                            rng.choice(np.arange(1, 16), size_b, replace=False)))
            scene_a = Scene(grid4, cells=cells_a)
            scene_b = Scene(grid4, cells=cells_b)
            transcript = run_protocol(scene_a, scene_b)
            hit, _ = classical_intersect(rasterize(scene_a), rasterize(scene_b))
            expected = Verdict.INTERSECT if hit else Verdict.DISJOINT
            assert transcript.verdict is expected


class TestAdversaries:
    def test_strategy_parsing(self):
        assert AdversaryStrategy.parse("honest") == HONEST
        tampered = AdversaryStrategy.parse("bob-tamper:3")
        assert tampered.attack is Attack.BOB_TAMPER
        assert tampered.tamper_mask == 3
        assert tampered.label == "bob-tamper:3"
        with pytest.raises(ValueError, match="unknown adversary"):
            AdversaryStrategy.parse("eve")
        with pytest.raises(ValueError, match="needs a mask"):
            AdversaryStrategy.parse("bob-tamper")
        with pytest.raises(ValueError, match="does not take"):
            AdversaryStrategy.parse("honest:1")

    def test_strategy_validation(self):
        with pytest.raises(ValueError, match="nonzero mask"):
            AdversaryStrategy(Attack.BOB_TAMPER, 0)
        with pytest.raises(ValueError, match="does not take a mask"):
            AdversaryStrategy(Attack.HONEST, 1)

    def test_tamper_aborts_the_run(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.BOB_TAMPER, 1)
        transcript = run_protocol(*worked_scenes, adversary=adversary)
        assert transcript.verdict is Verdict.ABORT
        assert transcript.estimate is None
        assert max(r.step for r in transcript.steps) == 3
        check = next(r for r in transcript.steps
                     if r.action == "uncompute_and_check")
        assert check.detail["pass_probability"] == 0.0
        transcript.validate()

    def test_oversized_tamper_mask_rejected(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.BOB_TAMPER, 16)
        with pytest.raises(ValueError, match="mask 16"):
            run_protocol(*worked_scenes, adversary=adversary)

    def test_measure_attack_passes_check_and_completes(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.BOB_MEASURE_ALL)
        transcript = run_protocol(*worked_scenes, adversary=adversary, seed=4)
        assert transcript.verdict in (Verdict.INTERSECT, Verdict.DISJOINT)
        check = next(r for r in transcript.steps
                     if r.action == "uncompute_and_check")
        assert check.detail["pass_probability"] == 1.0
        attack = next(r for r in transcript.steps
                      if r.action.startswith("attack:"))
        assert attack.step == 2
        assert transcript.estimate.engine == "circuit"
        assert transcript.estimate.success_prob is None

    def test_measure_attack_outcome_consistent(self, worked_scenes):
        # The collapsed address fixes the measured table value.
        adversary = AdversaryStrategy(Attack.BOB_MEASURE_ALL)
        table = (1, 2, 5, 6)
        for seed in range(6):
            transcript = run_protocol(*worked_scenes, adversary=adversary,
                                      seed=seed)
            attack = next(r for r in transcript.steps
                          if r.action.startswith("attack:"))
            assert attack.detail["data_outcome"] == \
                table[attack.detail["address_outcome"]]

    def test_alice_measure_result_records_an_xor(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.ALICE_MEASURE_RESULT)
        transcript = run_protocol(*worked_scenes, adversary=adversary, seed=9)
        attack = next(r for r in transcript.steps
                      if r.action == "attack:alice-measure-result")
        table_a, table_b = (1, 2, 5, 6), (6, 7, 10, 11)
        xors = {a ^ b for a in table_a for b in table_b}
        assert attack.detail["measured_xor_value"] in xors
        assert transcript.verdict in (Verdict.INTERSECT, Verdict.DISJOINT)


class TestDetectionProbability:
    def test_honest_is_exactly_zero(self, worked_scenes):
        assert detection_probability(*worked_scenes, HONEST) == 0.0

    @pytest.mark.parametrize("mask", [1, 2, 7, 15])
    def test_tamper_is_exactly_one(self, worked_scenes, mask):
        adversary = AdversaryStrategy(Attack.BOB_TAMPER, mask)
        assert detection_probability(*worked_scenes, adversary) == 1.0

    def test_measurement_attacks_evade_the_check(self, worked_scenes):
        for attack in (Attack.BOB_MEASURE_ALL, Attack.BOB_MEASURE_DATA):
            prob = detection_probability(*worked_scenes,
                                         AdversaryStrategy(attack))
            assert prob == 0.0

    def test_alice_side_attack_cannot_trip_the_check(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.ALICE_MEASURE_RESULT)
        assert detection_probability(*worked_scenes, adversary) == 0.0

    def test_exact_computation_is_deterministic(self, worked_scenes):
        adversary = AdversaryStrategy(Attack.BOB_MEASURE_DATA)
        first = detection_probability(*worked_scenes, adversary)
        second = detection_probability(*worked_scenes, adversary)
        assert first == second == 0.0


class TestCostSummary:
    def test_worked_sizes(self):
        cost = comm_cost(4, 4, 16)
        assert cost.alice_to_bob_qubits == 6
        assert cost.bob_to_alice_qubits == 12
        assert cost.total_qubits == 18
        assert cost.nominal_total_qubits == 22
        assert cost.baseline_bits == {"atallah": 1024, "qin": 1024}

    def test_minimum_widths(self):
        cost = comm_cost(1, 1, 1)
        assert (cost.address_bits_a, cost.address_bits_b, cost.value_bits) == (1, 1, 1)
        assert cost.total_qubits == 6

    def test_formulas_across_sizes(self, rng):
        for _ in range(20):
            size_a, size_b, cells = (int(v) for v in rng.integers(1, 40, size=3))
            cost = comm_cost(size_a, size_b, cells)
            m = max(1, math.ceil(math.log2(size_a)))
            n = max(1, math.ceil(math.log2(size_b)))
            r = max(1, math.ceil(math.log2(cells)))
            assert cost.total_qubits == 2 * m + n + 3 * r
            assert cost.nominal_total_qubits == 2 * m + n + 4 * r
            assert cost.baseline_bits["atallah"] == 4 * size_a ** 2 * cells
            assert cost.baseline_bits["qin"] == 2 * (size_a ** 2 + size_b ** 2) * cells

    def test_rejects_empty_inputs(self):
        with pytest.raises(ValueError, match=">= 1"):
            comm_cost(0, 1, 16)


class TestLeakageReport:
    def test_worked_table(self):
        report = leakage_report(DataTable((1, 2, 5, 6), 4), 16)
        assert abs(report.ensemble_entropy_bits - 2.0) < 1e-9
        assert abs(report.nominal_bound_bits - 6.0) < 1e-12
        assert report.mean_state_entropy_bits == 0.0

    def test_single_entry_table_has_no_entropy(self):
        report = leakage_report(DataTable((5,), 4), 16)
        assert abs(report.ensemble_entropy_bits) < 1e-12

    def test_holevo_equals_ensemble_for_pure_states(self, rng):
        for _ in range(10):
            size = int(rng.integers(1, 9))
            entries = rng.choice(np.arange(1, 16), size, replace=False)
            report = leakage_report(DataTable.from_serials(entries, 4), 16)
            assert report.holevo_bound_bits == report.ensemble_entropy_bits
            assert abs(report.ensemble_entropy_bits - math.log2(size)) < 1e-9


class TestPrivacyBoundaries:
    def test_parties_only_hold_their_own_table(self, worked_scenes):
        spec, _, _ = build_preparation(*worked_scenes)
        alice = AliceParty(spec.table_a)
        bob = BobParty(spec.table_b)
        assert vars(alice) == {"table": spec.table_a, "max_qubits": alice.max_qubits}
        assert vars(bob) == {"table": spec.table_b, "max_qubits": bob.max_qubits}

    def test_alice_output_ignores_bobs_table(self):
        alice = AliceParty(DataTable((1, 2, 5, 6), 4))
        baseline = alice.prepare_message().amplitudes
        AliceParty(DataTable((1, 2, 5, 6), 4))  # unrelated instance
        poisoned_bob = BobParty(DataTable((9, 10), 4))
        del poisoned_bob
        assert np.array_equal(alice.prepare_message().amplitudes, baseline)

    def test_bob_response_depends_only_on_message_and_his_table(self):
        # Bob's step is a pure function of the incoming state and his own
        # table; poisoning Alice's table object cannot reach it.
        bob = BobParty(DataTable((6, 7, 10, 11), 4))
        alice = AliceParty(DataTable((1, 2, 5, 6), 4))
        message = alice.prepare_message()
        baseline = bob.respond(message).amplitudes
        alice.table = DataTable((15,), 4)  # poison after the message exists
        assert np.array_equal(bob.respond(message).amplitudes, baseline)


class TestTranscriptValidation:
    def test_out_of_order_steps_rejected(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        transcript.steps = list(reversed(transcript.steps))
        with pytest.raises(ValueError, match="order"):
            transcript.validate()

    def test_abort_requires_failed_check(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        broken = ProtocolTranscript(
            steps=[StepRecord(1, "alice", "prepare_and_send", 6)],
            verdict=Verdict.ABORT, estimate=None, cost=transcript.cost,
            adversary="honest", seed=None, mode="exact")
        with pytest.raises(ValueError, match="failed check"):
            broken.validate()

    def test_completed_run_requires_all_steps(self, worked_scenes):
        transcript = run_protocol(*worked_scenes)
        transcript.steps = [r for r in transcript.steps if r.step != 5]
        with pytest.raises(ValueError, match="missing steps"):
            transcript.validate()
