"""Statevector and density-matrix simulation of MQ NMR dynamics of a spin dimer."""

from .state import (
    CapacityError,
    CoherenceDecomposition,
    CollectiveSpinZ,
    DensityMatrix,
    StateVector,
    coherence_decompose,
    density_from_pure,
    ground_state,
    partial_trace,
)
from .gates import (
    Circuit,
    Gate,
    GateKind,
    apply_gate,
    circuit_unitary,
    cnot_matrix,
    rotation_matrix,
    run_circuit,
    to_qasm,
)
from .model import (
    IntensityRecord,
    analytic_intensities_pure,
    analytic_intensities_thermal,
    general_coherence_intensities,
    h12_matrix,
    propagator,
    pure_evolved_state,
    thermal_density,
    thermal_evolved_density,
)
from .circuits import (
    dimer_propagator_circuit,
    pure_ground_circuit,
    purification_prep_circuit,
    theta_from_beta,
    thermal_full_circuit,
)
from .measurement import (
    NoiseModel,
    ShotHistogram,
    apply_depolarizing,
    estimate_pure_intensities,
    estimate_thermal_intensities,
    run_noisy_circuit,
    sample,
)

__version__ = "0.1.0"
