"""Ramsey spectroscopy simulations on entangled trapped-ion registers.

State-vector simulation of small ion strings (optionally with a shared
motional bus qubit), entangling gate sequences for GHZ preparation, collective
dephasing noise, frequency-estimation protocols, and Monte Carlo benchmarks of
how the estimate uncertainty scales with ion number and interrogation time.
"""

__version__ = "0.1.0"

from .bench import (
    DephasingCurve,
    DephasingReport,
    ScalingPoint,
    ScalingReport,
    analytic_sigma_tau,
    dephasing_benchmark,
    fringe_multiplier,
    golden_section,
    scan_scaling,
    theory_sigma,
)
from .errors import (
    AmbiguousFringeError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    DegenerateSlopeError,
    FitError,
    IonRamseyError,
    NormError,
    ProtocolError,
)
from .gates import (
    BusMap,
    Cnot,
    GateSequence,
    Rot,
    bus_map,
    cn_sequence,
    cn_via_bus,
    cnot,
    prepare_ghz,
    prepare_ghz_via_bus,
    reverse_prep,
)
from .noise import (
    ImperfectionSpec,
    NoiseSpec,
    apply_phase_noise,
    perturb_ghz,
    sample_dephasing_phases,
    symmetric_state,
)
from .protocols import (
    CalibrationState,
    FourierFit,
    FringeFit,
    RamseyConfig,
    ensemble_contrast,
    ensure_unambiguous,
    estimate_frequency,
    fit_fringe_frequency,
    flag_large_admixture,
    fourier_decompose,
    fringe_scan,
    ghz_signal,
    make_truth_simulator,
    naive_single_point_omega0,
    run_ghz_ramsey,
    run_standard_ramsey,
    standard_population,
    synthesize_signal,
    two_point_calibrate,
)
from .records import EstimateRecord, TrialRecord, write_records_csv
from .register import (
    MAX_IONS,
    MeasurementSample,
    PulseSpec,
    QubitRegister,
    apply_rotation,
    bus_purity,
    excitation_counts,
    expect_jz,
    expect_parity,
    expect_parity_normalized,
    expect_sz_ion,
    free_evolve,
    new_register,
    pi_half_pulse,
    prob_down_ion,
    sample_measurement,
)
from .streams import stream

__all__ = [
    "AmbiguousFringeError",
    "BusMap",
    "CalibrationState",
    "CapacityError",
    "Cnot",
    "ConfigError",
    "ConvergenceError",
    "DegenerateSlopeError",
    "DephasingCurve",
    "DephasingReport",
    "EstimateRecord",
    "FitError",
    "FourierFit",
    "FringeFit",
    "GateSequence",
    "ImperfectionSpec",
    "IonRamseyError",
    "MAX_IONS",
    "MeasurementSample",
    "NoiseSpec",
    "NormError",
    "ProtocolError",
    "PulseSpec",
    "QubitRegister",
    "RamseyConfig",
    "Rot",
    "ScalingPoint",
    "ScalingReport",
    "TrialRecord",
    "analytic_sigma_tau",
    "apply_phase_noise",
    "apply_rotation",
    "bus_map",
    "bus_purity",
    "cn_sequence",
    "cn_via_bus",
    "cnot",
    "dephasing_benchmark",
    "ensemble_contrast",
    "ensure_unambiguous",
    "estimate_frequency",
    "excitation_counts",
    "expect_jz",
    "expect_parity",
    "expect_parity_normalized",
    "expect_sz_ion",
    "fit_fringe_frequency",
    "flag_large_admixture",
    "fourier_decompose",
    "free_evolve",
    "fringe_multiplier",
    "fringe_scan",
    "ghz_signal",
    "golden_section",
    "make_truth_simulator",
    "naive_single_point_omega0",
    "new_register",
    "perturb_ghz",
    "pi_half_pulse",
    "prepare_ghz",
    "prepare_ghz_via_bus",
    "prob_down_ion",
    "reverse_prep",
    "run_ghz_ramsey",
    "run_standard_ramsey",
    "sample_dephasing_phases",
    "sample_measurement",
    "scan_scaling",
    "standard_population",
    "stream",
    "symmetric_state",
    "synthesize_signal",
    "theory_sigma",
    "two_point_calibrate",
    "write_records_csv",
]
