"""Monte Carlo time-domain validation of the spectral decoherence pipeline.

Independent of the quadrature path end to end: noise realizations with a
prescribed spectrum are synthesized in the frequency domain (independent
Gaussian amplitudes per bin, inverse FFT), the qubit phase is accumulated
through the pulse sequence per realization, and W(t) is estimated as the
magnitude of the ensemble average of e^{-i dphi} with a batch-means
standard error.

Synthesis notes
---------------
Each frequency bin k >= 1 receives the exact spectral power integrated
across its width (``spectra.band_power``), so the realized variance equals
the band integral regardless of how band edges fall relative to the grid.
The DC bin is always zero: noise below half a bin spacing is not
represented (traces are zero-mean by construction; the synthesis window in
``mc_decoherence`` spans four times the evolution time, and a random
window offset per trial suppresses the periodicity of the circular
embedding).

Imperfect pulses: with a systematic flip-angle error delta the per-trial
state is propagated as an explicit 2-level unitary product, alternating
free-dephasing segments exp(-i phi_seg sigma_z / 2) with rotations
exp(-i (pi + delta) sigma_x / 2); W is the normalized off-diagonal
magnitude of the averaged density matrix.  For delta = 0 the scalar
sign-toggling path is used (the two agree per-trial to roundoff, which the
tests check).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import coherence, spectra
from .sequences import PulseSequence

SYNTH_WINDOW_FACTOR = 4
MIN_TRIALS = 100
BATCH_COUNT = 10
_CHUNK_BYTES = 96e6


class OracleError(ValueError):
    """Invalid Monte Carlo request (aliasing, too few trials, bad grid)."""


@dataclass(frozen=True)
class NoiseTrace:
    """One sampled realization of the splitting fluctuation eps(t)."""

    dt: float
    samples: np.ndarray
    seed: int
    spectrum_id: str

    @property
    def duration(self) -> float:
        return (len(self.samples) - 1) * self.dt


@dataclass(frozen=True)
class McEstimate:
    w: float
    stderr: float
    trials: int
    seed: int


@dataclass(frozen=True)
class McComparison:
    t: float
    w_mc: float
    stderr: float
    w_spectral: float
    z: float
    flagged: bool


@dataclass(frozen=True)
class McReport:
    entries: tuple[McComparison, ...]
    z_threshold: float
    trials: int
    seed: int
    spectrum_id: str
    sequence_id: str

    @property
    def passed(self) -> bool:
        return not any(e.flagged for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "spectrum": self.spectrum_id, "sequence": self.sequence_id,
            "trials": self.trials, "seed": self.seed, "z_threshold": self.z_threshold,
            "passed": self.passed,
            "entries": [{"t_s": e.t, "w_mc": e.w_mc, "stderr": e.stderr,
                         "w_spectral": e.w_spectral, "z": e.z, "flagged": e.flagged}
                        for e in self.entries],
        }


def default_dt(s: spectra.PowerSpectrum) -> float:
    """1 / (8 f_uv): pulse-snapping error stays far below the shortest filter lobe."""
    return 1.0 / (8.0 * s.f_uv)


def _check_dt(s: spectra.PowerSpectrum, dt: float) -> None:
    if not (dt > 0.0) or not math.isfinite(dt):
        raise OracleError(f"dt must be positive and finite, got {dt}")
    if dt > 1.0 / (2.0 * s.f_uv) * (1.0 + 1e-12):
        raise OracleError(
            f"dt={dt:g} aliases the spectrum: need dt <= 1/(2 f_uv) = "
            f"{1.0 / (2.0 * s.f_uv):g}")


def _bin_amplitudes(s: spectra.PowerSpectrum, m: int, dt: float) -> np.ndarray:
    """Per-bin standard deviations for the rFFT synthesis (bins 1..(m-1)//2)."""
    df = 1.0 / (m * dt)
    k = np.arange(1, (m - 1) // 2 + 1)
    f = k * df
    power = spectra.band_power(s, f - 0.5 * df, f + 0.5 * df)  # variance per bin
    return np.sqrt(np.maximum(power, 0.0))


def _synth_batch(sigma: np.ndarray, m: int, rngs) -> np.ndarray:
    """Synthesize one real trace of length m per generator in ``rngs``."""
    nb = len(sigma)
    out_c = np.zeros((len(rngs), m // 2 + 1), dtype=complex)
    for i, rng in enumerate(rngs):
        a = rng.standard_normal(nb)
        b = rng.standard_normal(nb)
        out_c[i, 1:nb + 1] = (0.5 * m) * sigma * (a - 1j * b)
    return scipy.fft.irfft(out_c, n=m, axis=1)


def synthesize_noise(s: spectra.PowerSpectrum, duration: float, dt: float,
                     seed: int = 0) -> NoiseTrace:
    """Stationary zero-mean Gaussian realization with one-sided PSD S_f.

    The trace holds floor(duration/dt) + 1 samples at spacing dt (duration
    is floored to whole samples).  The averaged one-sided periodogram of
    many seeds reproduces S_f bin by bin; each bin carries the exact
    spectral power integrated across its width.
    """
    _check_dt(s, dt)
    n_intervals = int(math.floor(duration / dt + 1e-9))
    if n_intervals < 1:
        raise OracleError(f"duration {duration:g} shorter than one sample step {dt:g}")
    m = n_intervals + 1
    sigma = _bin_amplitudes(s, m, dt)
    rng = np.random.default_rng(_entropy(seed))
    samples = _synth_batch(sigma, m, [rng])[0]
    return NoiseTrace(dt=dt, samples=samples, seed=seed, spectrum_id=s.spectrum_id)


def _entropy(seed: int, trial: int | None = None):
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise OracleError(f"seed must be a nonnegative integer, got {seed!r}")
    return (int(seed),) if trial is None else (int(seed), int(trial))


def _pulse_sample_indices(seq: PulseSequence, k_intervals: int) -> np.ndarray:
    """Pulse times snapped to the nearest sample-grid point."""
    idx = np.rint(np.asarray(seq.fractions, dtype=float) * k_intervals).astype(int)
    if len(idx) and (idx[0] < 1 or idx[-1] > k_intervals - 1
                     or np.any(np.diff(idx) < 1)):
        raise OracleError(
            f"dt too coarse to resolve the pulse schedule: {seq.sequence_id} "
            f"snaps onto {k_intervals} intervals with collisions")
    return idx


def _toggling_weights(seq: PulseSequence, k_intervals: int, dt: float) -> np.ndarray:
    """Trapezoidal weights w such that dphi = w . eps_samples.

    The toggling sign eta starts at +1 and flips at each pulse index; each
    interval contributes eta * dt * (eps_i + eps_{i+1}) / 2.
    """
    idx = _pulse_sample_indices(seq, k_intervals)
    flips = np.zeros(k_intervals)
    for p in idx:
        flips[p:] += 1.0
    eta = np.where(flips % 2 == 0, 1.0, -1.0)
    w = np.zeros(k_intervals + 1)
    w[:-1] += 0.5 * eta
    w[1:] += 0.5 * eta
    return w * dt


def phase_integral(samples: np.ndarray, dt: float, seq: PulseSequence, t: float) -> float:
    """Toggled phase dphi = int_0^t eta(t') eps(t') dt' on a sampled trace.

    Summed with math.fsum, so the exact cancellation of a constant eps
    under a symmetric sequence (the static-noise echo identity) survives
    in floating point: the weight multiset is sign-symmetric and the
    products cancel exactly.
    """
    k = int(round(t / dt))
    if k < 2:
        raise OracleError(f"t={t:g} spans fewer than 2 sample steps of dt={dt:g}")
    if len(samples) < k + 1:
        raise OracleError(f"trace too short: need {k + 1} samples, have {len(samples)}")
    w = _toggling_weights(seq, k, dt)
    xs = np.asarray(samples, dtype=float)[:k + 1]
    return math.fsum(map(float, w * xs))


def _segment_boundaries(seq: PulseSequence, k_intervals: int) -> np.ndarray:
    idx = _pulse_sample_indices(seq, k_intervals)
    return np.concatenate(([0], idx, [k_intervals]))


def _unitary_offdiag(windows: np.ndarray, dt: float, seq: PulseSequence,
                     k_intervals: int, delta: float, return_norms: bool = False):
    """2 * psi_up * conj(psi_down) per trial after the full pulsed evolution.

    ``windows`` holds one sampled trace per row, at least k_intervals + 1
    samples each.  Pulses are exp(-i (pi + delta) sigma_x / 2); segments
    apply exp(-i phi sigma_z / 2) with phi the trapezoidal phase of eps.
    """
    win = windows[:, :k_intervals + 1]
    mid = 0.5 * (win[:, :-1] + win[:, 1:]) * dt
    cum = np.concatenate([np.zeros((win.shape[0], 1)), np.cumsum(mid, axis=1)], axis=1)
    bounds = _segment_boundaries(seq, k_intervals)
    half = 0.5 * (math.pi + delta)
    c, s = math.cos(half), -1j * math.sin(half)
    up = np.full(win.shape[0], 1.0 / math.sqrt(2.0), dtype=complex)
    dn = up.copy()
    for k in range(len(bounds) - 1):
        phi = cum[:, bounds[k + 1]] - cum[:, bounds[k]]
        rot = np.exp(-0.5j * phi)
        up = up * rot
        dn = dn * np.conj(rot)
        if k < len(bounds) - 2:
            up, dn = c * up + s * dn, s * up + c * dn
    off = 2.0 * up * np.conj(dn)
    if return_norms:
        return off, np.abs(up) ** 2 + np.abs(dn) ** 2
    return off


def _mc_w_grid(s: spectra.PowerSpectrum, seq: PulseSequence, t_grid, dt: float,
               trials: int, pulse_error: float, seed: int,
               window_factor: int = SYNTH_WINDOW_FACTOR):
    """Shared-trace Monte Carlo over a time grid; returns (w, stderr) arrays.

    Per trial: synthesize a trace ``window_factor`` times the longest
    evolution, pick a random window offset, then evaluate every t in the
    grid on nested windows of the same realization (the per-t estimates are
    therefore correlated across t, which is irrelevant for per-t error
    bars).
    """
    t_grid = [float(t) for t in t_grid]
    ks = [int(round(t / dt)) for t in t_grid]
    if any(k < 2 for k in ks):
        raise OracleError("every t must span at least 2 sample steps")
    k_max = max(ks)
    m = scipy.fft.next_fast_len(int(window_factor) * k_max + 1)
    sigma = _bin_amplitudes(s, m, dt)
    max_offset = m - (k_max + 1)

    weights = [_toggling_weights(seq, k, dt) for k in ks]
    if pulse_error != 0.0:
        for k in ks:
            _pulse_sample_indices(seq, k)  # validate snapping for every t

    n_t = len(t_grid)
    batch_sums = np.zeros((BATCH_COUNT, n_t), dtype=complex)
    batch_counts = np.zeros(BATCH_COUNT, dtype=int)

    chunk = max(1, min(256, int(_CHUNK_BYTES / (m * 8 * 3))))
    for start in range(0, trials, chunk):
        stop = min(start + chunk, trials)
        rngs = [np.random.default_rng(_entropy(seed, i)) for i in range(start, stop)]
        offsets = np.array([rng.integers(0, max_offset + 1) for rng in rngs])
        traces = _synth_batch(sigma, m, rngs)
        windows = traces[np.arange(len(rngs))[:, None],
                         offsets[:, None] + np.arange(k_max + 1)[None, :]]
        vals = np.empty((len(rngs), n_t), dtype=complex)
        for j, (k, w) in enumerate(zip(ks, weights)):
            if pulse_error == 0.0:
                dphi = windows[:, :k + 1] @ w
                vals[:, j] = np.exp(-1j * dphi)
            else:
                vals[:, j] = _unitary_offdiag(windows, dt, seq, k, pulse_error)
        batch_ids = (np.arange(start, stop) * BATCH_COUNT) // trials
        for b in range(BATCH_COUNT):
            sel = batch_ids == b
            if np.any(sel):
                batch_sums[b] += vals[sel].sum(axis=0)
                batch_counts[b] += int(np.sum(sel))

    w_batch = np.abs(batch_sums / batch_counts[:, None])
    w_full = np.abs(batch_sums.sum(axis=0) / trials)
    stderr = np.std(w_batch, axis=0, ddof=1) / math.sqrt(BATCH_COUNT)
    return w_full, stderr


def mc_decoherence(s: spectra.PowerSpectrum, seq: PulseSequence, t: float,
                   dt: float | None = None, trials: int = 2000,
                   pulse_error: float = 0.0, seed: int = 0,
                   window_factor: int = SYNTH_WINDOW_FACTOR) -> McEstimate:
    """Ensemble estimate of W(t) from time-domain noise realizations.

    ``window_factor`` stretches the per-trial synthesis window (default 4x
    the evolution time); raise it when noise components slower than the
    default window must be represented, at proportional cost.
    """
    if not (t > 0.0) or not math.isfinite(t):
        raise OracleError(f"t must be positive and finite, got {t}")
    if trials < MIN_TRIALS:
        raise OracleError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if not math.isfinite(pulse_error):
        raise OracleError("pulse_error must be finite")
    if dt is None:
        dt = default_dt(s)
    _check_dt(s, dt)
    w, err = _mc_w_grid(s, seq, [t], dt, trials, pulse_error, seed,
                        window_factor=window_factor)
    return McEstimate(w=float(w[0]), stderr=float(err[0]), trials=trials, seed=seed)


def compare_mc_spectral(s: spectra.PowerSpectrum, seq: PulseSequence, t_grid,
                        dt: float | None = None, trials: int = 2000, seed: int = 0,
                        tol: float = 1e-6, z_threshold: float = 3.5) -> McReport:
    """Per-t z-scores of the Monte Carlo estimate against the spectral W(t).

    Perfect pulses only: the spectral formula assumes exact pi rotations.
    """
    if trials < MIN_TRIALS:
        raise OracleError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if dt is None:
        dt = default_dt(s)
    _check_dt(s, dt)
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(b <= a for a, b in zip(t_grid[:-1], t_grid[1:])):
        raise OracleError("t_grid must be nonempty and strictly increasing")
    w_mc, stderr = _mc_w_grid(s, seq, t_grid, dt, trials, 0.0, seed)
    entries = []
    for t, wm, se in zip(t_grid, w_mc, stderr):
        ws = coherence.decoherence_at(s, seq, t, tol=tol)
        if se > 0:
            z = (wm - ws) / se
        else:
            z = 0.0 if wm == ws else math.copysign(math.inf, wm - ws)
        entries.append(McComparison(t=t, w_mc=float(wm), stderr=float(se),
                                    w_spectral=ws, z=float(z),
                                    flagged=bool(abs(z) > z_threshold)))
    return McReport(entries=tuple(entries), z_threshold=z_threshold, trials=trials,
                    seed=seed, spectrum_id=s.spectrum_id, sequence_id=seq.sequence_id)
