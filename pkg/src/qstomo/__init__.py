"""Quantum state reconstruction by iterative imposition of measured statistics."""

from .baseline import baseline_estimate, gell_mann_basis, linear_inversion, psd_project
from .errors import TomographyError
from .imposition import (
    EnsembleResult,
    IterationConfig,
    ReconstructionResult,
    ReconstructionTrace,
    StopReason,
    impose,
    impose_pure,
    impose_rank,
    reconstruct,
    reconstruct_ensemble,
    success_rate,
    sweep,
)
from .metrics import distributional, hellinger, hs_distance
from .observables import (
    Observable,
    ObservableSet,
    mub_set,
    pauli_set,
    projector,
    random_observable_set,
)
from .simulate import (
    MeasurementRecord,
    born_probabilities,
    depolarize,
    record_set,
    sample_record,
)
from .states import (
    DensityMatrix,
    fidelity_to_pure,
    purity,
    random_mixed_state,
    random_pure_state,
    random_state_vector,
    validate_state,
)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "EnsembleResult",
    "IterationConfig",
    "MeasurementRecord",
    "Observable",
    "ObservableSet",
    "ReconstructionResult",
    "ReconstructionTrace",
    "StopReason",
    "TomographyError",
    "baseline_estimate",
    "born_probabilities",
    "depolarize",
    "distributional",
    "fidelity_to_pure",
    "gell_mann_basis",
    "hellinger",
    "hs_distance",
    "impose",
    "impose_pure",
    "impose_rank",
    "linear_inversion",
    "mub_set",
    "pauli_set",
    "projector",
    "psd_project",
    "purity",
    "random_mixed_state",
    "random_observable_set",
    "random_pure_state",
    "random_state_vector",
    "reconstruct",
    "reconstruct_ensemble",
    "record_set",
    "sample_record",
    "success_rate",
    "sweep",
    "validate_state",
]
