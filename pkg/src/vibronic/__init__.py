"""Vibronic spectra from Gaussian boson sampling circuits."""

from .config import RunConfig, from_env
from .doktorov import (
    DuschinskyParams,
    MolecularParams,
    doktorov_circuit,
    doktorov_transform,
    duschinsky_params,
)
from .errors import (
    ConstraintError,
    CostGuardError,
    DecompositionError,
    SolveError,
    ValidationError,
    VibronicError,
)
from .extension import (
    ExtendedTransform,
    ThermalSpec,
    VibronicInputPrep,
    build_extended,
    heralded_probability,
    joint_probability,
    joint_probability_table,
    synthesize_vibronic_prep,
    thermal_occupation,
    thermal_weight,
)
from .fock import (
    FockAmplitudeTable,
    circuit_amplitude,
    displacement_matrix,
    rotation_amplitude,
    squeeze_matrix,
    state_probabilities,
)
from .gaussian import (
    BlochMessiahFactors,
    BogoliubovTransform,
    Displacement,
    GaussianState,
    OpticalCircuit,
    Rotation,
    Squeeze,
    TwoModeSqueeze,
    apply_to_vacuum,
    bloch_messiah,
    circuit_transform,
    compose,
    reduce_modes,
    reorder_displacement,
    synthesize_circuit,
    validate,
)
from .permanent import permanent
from .spectrum import Spectrum, fcp_direct, fcp_extended, thermal_ensemble

__version__ = "0.1.0"
