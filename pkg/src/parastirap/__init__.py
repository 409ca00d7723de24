"""Parallel adiabatic passage in three-level lambda systems.

Pulse-pair design with equidistant instantaneous eigenvalues, Schrodinger
propagation, efficiency benchmarks against conventional STIRAP, Monte-Carlo
noise robustness, and spectral-shaper mask synthesis.
"""

from .benchmark import (
    DelayScanResult,
    StrategySpec,
    SweepPoint,
    SweepResult,
    crossover,
    delay_scan,
    sweep_strategy,
    write_sweep_csv,
    write_sweep_manifest,
)
from .design import (
    DesignParams,
    Schedule,
    StirapParams,
    detuning_schedule,
    fluence,
    gaussian_fit_envelopes,
    linearized_schedule,
    make_parallel_schedule,
    pulse_area,
    read_schedule_csv,
    solve_parallel_rabi,
    stirap_schedule,
    uniform_grid,
    write_schedule_csv,
)
from .errors import (
    ConfigError,
    ContractViolationError,
    InfeasibleDesignError,
    InvalidParameterError,
    InvalidStateError,
    InvalidStepError,
    ParastirapError,
    UnreachableTargetError,
    UnsupportedVariantError,
    WindowingViolationError,
)
from .lambda_system import (
    EigenSystem,
    FieldPoint,
    Hamiltonian3,
    QuantumState,
    align_eigenvectors,
    build_hamiltonian,
    eigensystem,
    eigenvalues_of_fields,
)
from .noise import (
    MonteCarloResult,
    NoiseConfig,
    NoisyRealization,
    monte_carlo,
    perturb_fields,
    realization_rng,
    write_mean_populations_csv,
)
from .propagator import (
    DEFAULT_DT,
    PropagationResult,
    adiabatic_projection,
    propagate,
    write_populations_csv,
)
from .shaper import (
    ComplexField,
    PhysicalConfig,
    PhysicalScale,
    SpectralField,
    instantaneous_phase,
    peak_intensity,
    physical_units,
    pixelize,
    recovered_frequency,
    seed_spectrum,
    shape_roundtrip,
    to_spectrum,
    to_temporal,
    transmission_mask,
)

__version__ = "0.1.0"
