"""Coherence of a spin-1 qubit stored in the Zeeman sublevels of an
optically trapped atom: trap-induced fields and rates, exact spin-1
evolution in effective magnetic fields, noise-ensemble dephasing curves,
dephasing-model fits and partial state tomography.
"""

from .constants import CONST, RB87, AtomSpecies, DLine, PhysicalConstants
from .dephasing import (DecayCurve, TimeGrid, analytic_survival,
                        apply_shot_noise, ensemble_density, ensemble_survival,
                        quadrature_survival, stretched_survival_exact,
                        time_constant_from_width, width_from_std)
from .fitting import FitResult, fit_decay
from .noise import (AxisNoise, FieldNoiseModel, GaussianFieldDist,
                    ThermalShiftDist, UniformFieldDist, maxwell_boltzmann_pdf,
                    pdf_delta_bsigma, pdf_potential, sample_field,
                    sample_fields, verify_mb_convolution)
from .spin1 import (EigenFrame, FieldVector, Spin1Density, Spin1State,
                    eigenframe, evolve, evolve_density, hamiltonian,
                    larmor_frequency, named_state, propagate_piecewise,
                    survival_probability)
from .tomography import (MeasurementRecord, PauliExpectations, PurityReport,
                         ReconstructedState, expectations_from_density,
                         expectations_from_records, purity_parameter,
                         reconstruct_density, simulate_measurement)
from .trap import (PolarizationSpec, TrapConfig, inverse_detuning_gap,
                   peak_intensity, raman_scatter_rate, trap_depth,
                   trap_frequencies, vector_shift_field)

__version__ = "0.1.0"

__all__ = [
    "CONST", "RB87", "AtomSpecies", "DLine", "PhysicalConstants",
    "TrapConfig", "PolarizationSpec", "peak_intensity", "trap_depth",
    "trap_frequencies", "raman_scatter_rate", "vector_shift_field",
    "inverse_detuning_gap",
    "FieldVector", "Spin1State", "Spin1Density", "EigenFrame", "eigenframe",
    "evolve", "survival_probability", "evolve_density", "propagate_piecewise",
    "hamiltonian", "larmor_frequency", "named_state",
    "GaussianFieldDist", "UniformFieldDist", "ThermalShiftDist", "AxisNoise",
    "FieldNoiseModel", "pdf_potential", "pdf_delta_bsigma", "sample_field",
    "sample_fields", "verify_mb_convolution", "maxwell_boltzmann_pdf",
    "TimeGrid", "DecayCurve", "analytic_survival", "stretched_survival_exact",
    "time_constant_from_width", "width_from_std", "ensemble_survival",
    "apply_shot_noise",
    "quadrature_survival", "ensemble_density",
    "FitResult", "fit_decay",
    "MeasurementRecord", "PauliExpectations", "PurityReport",
    "ReconstructedState", "simulate_measurement", "expectations_from_records",
    "expectations_from_density", "reconstruct_density", "purity_parameter",
    "__version__",
]
