"""Exact simulator for a privacy-preserving quantum two-party
geometric-intersection protocol."""

from .registers import DEFAULT_MAX_QUBITS, RegisterLayout
from .state import (DensityMatrix, QuantumState, apply_permutation,
                    apply_phase_flip, basis_state, measure_distribution,
                    measure_register, reduced_density, reflect_about, tensor,
                    von_neumann_entropy)
from .oracles import (ADDR_A, ADDR_B, COUNT, DATA_A, DATA_B, DataTable,
                      PreparationSpec, address_bits, cheat_check, oracle_load,
                      oracle_xor, prepare_encoded, prepare_joint,
                      prepare_uniform)
from .geometry import (GridConfig, GridSet, Rect, Scene, SceneFormatError,
                       classical_intersect, grid_serial, load_scene, rasterize,
                       scene_from_dict, serial_cell)
from .counting import (CountEstimate, CountingConfig, GroverIterate, Verdict,
                       decide_intersection, decode_count,
                       default_counting_bits, exact_count, grover_iterate,
                       phase_estimate)
from .protocol import (HONEST, AdversaryStrategy, Attack, CostSummary,
                       LeakageReport, ProtocolTranscript, StepRecord,
                       build_preparation, comm_cost, detection_probability,
                       leakage_report, run_protocol)

__version__ = "0.1.0"
