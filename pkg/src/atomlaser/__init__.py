"""Two-mode simulator for squeezing transfer from light to an outcoupled atom beam."""

from .fock import (
    MomentSet,
    ModeVector,
    SqueezedInput,
    Truncation,
    TruncationError,
    TwoModeState,
    coherent_state,
    extract_moments,
    ladder_matrix,
    mode_moments,
    squeezed_coherent_state,
    tensor_product,
)
from .observables import (
    AlphaPair,
    InvariantViolationError,
    ObservableRecord,
    ScenarioConfig,
    input_moments,
    literal_record,
    mandel_q,
    moment_map_record,
    squeeze_coeffs,
)
from .oracle import (
    EvolutionResult,
    HamiltonianMatrix,
    build_hamiltonian,
    convergence_sweep,
    evolve,
    scenario_initial_state,
)
from .propagator import (
    DetuningGeometry,
    ModelParams,
    PropagatorMatrix,
    ResonanceError,
    conversion_times,
    detuning_geometry,
    heisenberg_moment_map,
    propagator_at,
)
from .verify import DiscrepancyReport, discrepancy_report

__version__ = "0.1.0"
