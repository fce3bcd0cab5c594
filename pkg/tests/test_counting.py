import math

import numpy as np
import pytest

from qgi import (CountingConfig, DataTable, PreparationSpec, Verdict,
                 decide_intersection, decode_count, default_counting_bits,
                 exact_count, grover_iterate, phase_estimate, prepare_joint)
from qgi.counting import EIGHT_OVER_PI_SQ, counting_layout
from support import random_spec, random_state

WORKED = PreparationSpec(DataTable((1, 2, 5, 6), 4), DataTable((6, 7, 10, 11), 4))
DISJOINT = PreparationSpec(DataTable((1, 2), 4), DataTable((3, 4), 4))


class TestDefaults:
    @pytest.mark.parametrize("k, bits", [(1, 3), (2, 4), (3, 5), (16, 7), (64, 9)])
    def test_default_counting_bits(self, k, bits):
        assert default_counting_bits(k) == bits

    def test_config_validation(self):
        with pytest.raises(ValueError, match="mode"):
            CountingConfig(mode="guess")
        with pytest.raises(ValueError, match="engine"):
            CountingConfig(engine="warp")
        with pytest.raises(ValueError, match=">= 1"):
            CountingConfig(bits=0)


class TestDecode:
    def test_decode_identity_and_pair_symmetry(self):
        bits, k = 7, 16
        size = 1 << bits
        for y in range(size):
            expected = k * math.sin(math.pi * y / size) ** 2
            assert abs(decode_count(y, k, bits) - expected) < 1e-12
            assert abs(decode_count(y, k, bits)
                       - decode_count((size - y) % size, k, bits)) < 1e-12

    def test_decode_bounds(self):
        for y in range(128):
            value = decode_count(y, 16, 7)
            assert 0.0 <= value <= 16.0


class TestGroverIterate:
    def test_no_match_state_is_fixed_point(self):
        iterate = grover_iterate(DISJOINT)
        psi = iterate.prepared
        once = iterate.apply(psi)
        twice = iterate.apply(once)
        assert np.max(np.abs(once.amplitudes - psi.amplitudes)) < 1e-10
        assert np.max(np.abs(twice.amplitudes - psi.amplitudes)) < 1e-10

    def test_overlap_after_one_step_is_cos_theta(self):
        # One match among sixteen pairs: sin^2(theta/2) = 1/16.
        iterate = grover_iterate(WORKED)
        psi = iterate.prepared
        overlap = np.vdot(psi.amplitudes, iterate.apply(psi).amplitudes)
        assert abs(overlap.imag) < 1e-12
        assert abs(overlap.real - (1 - 2 / 16)) < 1e-12
        assert abs(iterate.marked_mass - 1 / 16) < 1e-12

    def test_norm_preserved_on_random_states(self):
        iterate = grover_iterate(WORKED)
        gen = np.random.default_rng(99)
        for _ in range(100):
            state = random_state(WORKED.layout(), gen)
            out = iterate.apply(state)
            norm_sq = float(np.vdot(out.amplitudes, out.amplitudes).real)
            assert abs(norm_sq - 1.0) < 1e-12

    def test_inverse_composes_to_identity(self, rng):
        iterate = grover_iterate(WORKED)
        for _ in range(20):
            state = random_state(WORKED.layout(), rng)
            back = iterate.apply_inverse(iterate.apply(state))
            assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-12

    def test_raw_and_state_application_agree(self, rng):
        iterate = grover_iterate(WORKED)
        state = random_state(WORKED.layout(), rng)
        via_state = iterate.apply(state).amplitudes
        via_raw = iterate.apply_amplitudes(state.amplitudes)
        assert np.max(np.abs(via_state - via_raw)) < 1e-12


class TestExactCount:
    def test_worked_instance(self):
        assert exact_count(prepare_joint(WORKED)) == 1

    def test_disjoint_sets(self):
        assert exact_count(prepare_joint(DISJOINT)) == 0

    def test_identical_sets(self):
        spec = PreparationSpec(DataTable((1, 2, 5, 6), 4), DataTable((1, 2, 5, 6), 4))
        assert exact_count(prepare_joint(spec)) == 4

    def test_non_uniform_state_rejected(self):
        from qgi import QuantumState
        layout = WORKED.layout()
        amps = np.zeros(layout.dim, dtype=complex)
        amps[0] = math.sqrt(0.75)
        amps[1] = math.sqrt(0.25)
        with pytest.raises(ValueError, match="not an honest preparation"):
            exact_count(QuantumState(layout, amps))


class TestPhaseEstimate:
    def test_worked_instance_decodes_one_match(self):
        est = phase_estimate(WORKED, CountingConfig(bits=7))
        assert est.t_rounded == 1
        assert est.success_prob >= EIGHT_OVER_PI_SQ
        assert decide_intersection(est) is Verdict.INTERSECT

    def test_estimate_invariants(self):
        est = phase_estimate(WORKED, CountingConfig(bits=7))
        assert 0 <= est.y < 2 ** 7
        assert abs(est.t_hat - decode_count(est.y, 16, 7)) < 1e-12
        assert 0.0 <= est.t_hat <= 16.0
        assert est.t_rounded == round(est.t_hat)
        assert abs(est.theta_hat - 2 * math.pi * est.y / 128) < 1e-12
        assert abs(est.distribution.sum() - 1.0) < 1e-12

    def test_no_match_is_deterministic_zero(self):
        for engine in ("circuit", "reduced"):
            est = phase_estimate(DISJOINT, CountingConfig(engine=engine))
            assert est.y == 0
            assert est.distribution[0] >= 1.0 - 1e-10
            assert est.t_rounded == 0
            assert decide_intersection(est) is Verdict.DISJOINT

    def test_full_overlap_singleton_hits_half_turn(self):
        spec = PreparationSpec(DataTable((5,), 3), DataTable((5,), 3))
        est = phase_estimate(spec, CountingConfig(bits=3))
        assert est.y == 4
        assert abs(est.distribution[4] - 1.0) < 1e-10
        assert est.t_rounded == 1
        assert decide_intersection(est) is Verdict.INTERSECT

    def test_engines_agree_on_random_instances(self):
        gen = np.random.default_rng(31337)
        for _ in range(12):
            spec = random_spec(gen)
            circuit = phase_estimate(spec, CountingConfig(engine="circuit"))
            reduced = phase_estimate(spec, CountingConfig(engine="reduced"))
            assert circuit.bits == reduced.bits
            assert np.max(np.abs(circuit.distribution
                                 - reduced.distribution)) < 1e-10

    def test_map_decode_matches_exact_count_on_random_instances(self):
        gen = np.random.default_rng(777)
        for _ in range(25):
            spec = random_spec(gen)
            est = phase_estimate(spec)
            assert est.t_rounded == exact_count(prepare_joint(spec))

    def test_circuit_engine_respects_qubit_cap(self):
        top = (1 << 6) - 1
        entries = tuple(range(1, 9))
        spec = PreparationSpec(DataTable(entries, 6),
                               DataTable(tuple(top - i for i in range(8)), 6))
        with pytest.raises(ValueError, match="27 qubits"):
            phase_estimate(spec, CountingConfig(engine="circuit"))
        # auto falls back to the reduced engine instead
        est = phase_estimate(spec)
        assert est.engine == "reduced"

    def test_sample_mode_is_seed_deterministic(self):
        one = phase_estimate(WORKED, CountingConfig(mode="sample", seed=5))
        two = phase_estimate(WORKED, CountingConfig(mode="sample", seed=5))
        other = phase_estimate(WORKED, CountingConfig(mode="sample", seed=6))
        assert one.y == two.y
        assert one.success_prob is None
        assert 0 <= other.y < 128

    def test_initial_state_forces_circuit_engine(self):
        collapsed = prepare_joint(WORKED)
        est = phase_estimate(WORKED, initial_state=collapsed)
        assert est.engine == "circuit"
        assert est.success_prob is None
        with pytest.raises(ValueError, match="reduced engine"):
            phase_estimate(WORKED, CountingConfig(engine="reduced"),
                           initial_state=collapsed)

    def test_counting_layout_appends_register(self):
        layout = counting_layout(WORKED, 7)
        assert layout.names == ("addr_a", "data_a", "addr_b", "data_b", "count")
        assert layout.total_qubits == 12 + 7
