"""Decoherence function W(t), coherence time T2, and sequence scans.

W(t) = exp(-chi(t)) with chi the spectral overlap integral of the noise
density and the sequence filter (see ``quadrature``).  chi is linear in the
spectral amplitude, which makes two things cheap: scaling a spectrum by c
raises W to the power c, and calibrating a spectrum so that the free
induction decay crosses 1/e at a chosen time is a single chi evaluation.

T2 is defined by the FIRST crossing W(T2) = 1/e.  Under pulse sequences
W need not be monotone, so the solver brackets the first crossing on a
geometric grid and bisects inside the bracket, flagging any
non-monotonicity it sampled instead of guessing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectra
from .quadrature import DEFAULT_BUDGET, QuadratureError, chi_integral
from .sequences import FID, PulseSequence, pulse_times

W_TARGET = 1.0 / math.e
SCAN_START_FRACTION = 1e-4   # bracket scan starts at this fraction of t_max
SCAN_GROWTH = 1.5
BISECT_REL_WIDTH = 1e-4

DEFAULT_TOL_CURVE = 1e-6
DEFAULT_TOL_SCAN = 1e-5


@dataclass(frozen=True)
class DecoherenceCurve:
    """Sampled (t, W(t)) pairs with provenance."""

    times: tuple[float, ...]
    w: tuple[float, ...]
    spectrum_id: str
    sequence_id: str
    tol: float


@dataclass(frozen=True)
class CoherenceResult:
    """First 1/e crossing of W(t); t2 = t_max with converged=False if none found."""

    t2: float
    crossing_bracket: tuple[float, float]
    n_pulses: int
    family: str
    converged: bool
    monotone: bool = True
    error: str | None = None


def chi_at(s: spectra.PowerSpectrum, seq: PulseSequence, t: float,
           tol: float = DEFAULT_TOL_CURVE, budget: int = DEFAULT_BUDGET) -> float:
    """Decoherence exponent chi(t) >= 0; chi(0) = 0 without quadrature."""
    if t < 0.0 or not math.isfinite(t):
        raise ValueError(f"t must be >= 0 and finite, got {t}")
    if t == 0.0:
        return 0.0
    return chi_integral(s, seq, t, tol=tol, budget=budget).value


def decoherence_at(s: spectra.PowerSpectrum, seq: PulseSequence, t: float,
                   tol: float = DEFAULT_TOL_CURVE, budget: int = DEFAULT_BUDGET) -> float:
    """W(t) = exp(-chi(t)) in (0, 1]; W(0) = 1 exactly."""
    return math.exp(-chi_at(s, seq, t, tol=tol, budget=budget))


def decoherence_curve(s: spectra.PowerSpectrum, seq: PulseSequence, times,
                      tol: float = DEFAULT_TOL_CURVE) -> DecoherenceCurve:
    """Evaluate W on a strictly increasing time grid."""
    ts = [float(t) for t in times]
    if any(b <= a for a, b in zip(ts[:-1], ts[1:])):
        raise ValueError("time grid must be strictly increasing")
    ws = tuple(decoherence_at(s, seq, t, tol=tol) for t in ts)
    return DecoherenceCurve(tuple(ts), ws, s.spectrum_id, seq.sequence_id, tol)


def multi_source_w(sources, seq: PulseSequence, t: float,
                   tol: float = DEFAULT_TOL_CURVE) -> float:
    """W for several uncorrelated sources: the product of individual W's.

    Equivalent (within 2*tol) to a single evaluation on combine(sources)
    because chi is additive over summed spectra.
    """
    sources = list(sources)
    if not sources:
        raise ValueError("multi_source_w needs a nonempty list of spectra")
    w = 1.0
    for src in sources:
        w *= decoherence_at(src, seq, t, tol=tol)
    return w


def coherence_time(s: spectra.PowerSpectrum, seq: PulseSequence, t_max: float,
                   tol: float = DEFAULT_TOL_SCAN) -> CoherenceResult:
    """First 1/e crossing of W(t) on (0, t_max].

    Geometric bracketing scan (factor 1.5 from 1e-4 * t_max) followed by
    bisection to relative bracket width 1e-4.  Quadrature failures
    propagate as QuadratureError.
    """
    if not (t_max > 0.0) or not math.isfinite(t_max):
        raise ValueError(f"t_max must be positive and finite, got {t_max}")

    samples: list[tuple[float, float]] = []

    def w_of(t: float) -> float:
        w = decoherence_at(s, seq, t, tol=tol)
        samples.append((t, w))
        return w

    lo, w_lo = 0.0, 1.0
    hi = SCAN_START_FRACTION * t_max
    w_hi = w_of(hi)
    while w_hi >= W_TARGET and hi < t_max:
        lo, w_lo = hi, w_hi
        hi = min(hi * SCAN_GROWTH, t_max)
        w_hi = w_of(hi)

    if w_hi >= W_TARGET:
        # no crossing up to t_max
        mono = _monotone(samples, 0.0, t_max)
        return CoherenceResult(t_max, (lo, t_max), seq.n_pulses, seq.family,
                               converged=False, monotone=mono)

    bracket = (lo, hi)
    while (hi - lo) > BISECT_REL_WIDTH * hi:
        mid = 0.5 * (lo + hi)
        if w_of(mid) >= W_TARGET:
            lo = mid
        else:
            hi = mid
    t2 = 0.5 * (lo + hi)
    mono = _monotone(samples, bracket[0], bracket[1])
    return CoherenceResult(t2, bracket, seq.n_pulses, seq.family,
                           converged=True, monotone=mono)


def _monotone(samples, lo: float, hi: float) -> bool:
    inside = sorted((t, w) for t, w in samples if lo <= t <= hi)
    return all(b[1] < a[1] for a, b in zip(inside[:-1], inside[1:]))


def pulse_scan(s: spectra.PowerSpectrum, family: str, n_list, t_max: float,
               tol: float = DEFAULT_TOL_SCAN) -> list[CoherenceResult]:
    """coherence_time per pulse count; per-point failures recorded, scan continues.

    For family 'cdd' the entries of n_list are concatenation levels.
    """
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    out: list[CoherenceResult] = []
    for n in n_list:
        seq = (pulse_times(family, level=n) if family == "cdd"
               else pulse_times(family, n=n))
        try:
            out.append(coherence_time(s, seq, t_max, tol=tol))
        except QuadratureError as exc:
            out.append(CoherenceResult(math.nan, (math.nan, math.nan), seq.n_pulses,
                                       seq.family, converged=False, monotone=True,
                                       error=str(exc)))
    return out


def calibrate_to_t2(s: spectra.PowerSpectrum, t2_target: float = 1.0,
                    seq: PulseSequence = FID, tol: float = 1e-8) -> spectra.PowerSpectrum:
    """Rescale a spectrum's amplitude so that W(t2_target) = 1/e exactly.

    chi is linear in the amplitude, so the calibration factor is
    1 / chi(t2_target) evaluated once on the unscaled spectrum.  With the
    default FID sequence this pins T2(FID) = t2_target, which turns
    sequence comparisons into pure ratios independent of the coupling
    strength.
    """
    chi1 = chi_at(s, seq, t2_target, tol=tol)
    if chi1 <= 0.0:
        raise ValueError("cannot calibrate a spectrum with zero chi")
    return spectra.scale(s, 1.0 / chi1)
