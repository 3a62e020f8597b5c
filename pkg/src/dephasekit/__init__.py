"""Coherence calculator for a single trapped-atom qubit.

Modules map onto the pipeline: ``spectra`` (noise models), ``sequences``
(pulse schedules and filter functions), ``quadrature`` + ``coherence``
(decoherence function W(t) and T2 extraction), ``trap`` (light-shift
coupling and diagnostics), ``oracle`` (Monte Carlo time-domain
cross-validation) and ``cli``.
"""
from ._kernels import BACKEND as kernel_backend
from .coherence import (CoherenceResult, DecoherenceCurve, calibrate_to_t2,
                        coherence_time, decoherence_at, decoherence_curve,
                        multi_source_w, pulse_scan)
from .oracle import McEstimate, McReport, NoiseTrace, compare_mc_spectral, \
    mc_decoherence, synthesize_noise
from .quadrature import ChiResult, QuadratureError, chi_integral
from .sequences import (FID, PulseSequence, cdd, cpmg, custom_sequence,
                        filter_closed_form, filter_generic, pdd, pulse_times,
                        se, udd)
from .spectra import (PowerSpectrum, combine, eval_angular, eval_one_sided,
                      make_lorentzian, make_power_law, make_tabulated,
                      make_white, paper_intensity_spectrum, scale, variance)
from .trap import (LightShiftResult, TrapConfig, adiabaticity_ratio,
                   differential_light_shift, inverse_effective_detuning,
                   preset, zeeman_splitting)

__version__ = "0.1.0"
