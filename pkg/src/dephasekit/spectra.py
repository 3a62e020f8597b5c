"""Noise power spectra of the qubit splitting fluctuation.

Conventions
-----------
The splitting fluctuation eps(t) is an angular frequency (rad/s).  Spectra
are stored as one-sided per-Hz densities S_f(f) with units (rad/s)^2/Hz and
hard band limits: S_f is identically zero outside [f_ir, f_uv].  The
two-sided angular-frequency density that enters the decoherence integral
(the Fourier transform of the autocorrelation, even in omega) is derived on
demand as

    S(omega) = S_f(omega / 2 pi) / 2,

which makes the variance identical under both conventions:

    Var[eps] = int_0^inf S_f(f) df = int_0^inf (domega / pi) S(omega).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

TWO_PI = 2.0 * math.pi

KINDS = ("power_law", "white", "lorentzian", "tabulated", "sum")

# bundled 1064-nm intensity-noise preset: one-sided relative-intensity PSD
# A_rel * f^-alpha, hard-banded between the trap-lifetime IR cutoff and 1 kHz
PAPER_PRESET_NAME = "paper-yag-1f"
PAPER_REL_AMPLITUDE = 10.0 ** -8.5   # 1/Hz at f = 1 Hz
PAPER_EXPONENT = 5.0 / 3.0
PAPER_OMEGA_IR = 0.016               # rad/s
PAPER_F_IR = PAPER_OMEGA_IR / TWO_PI  # Hz
PAPER_F_UV = 1000.0                  # Hz


class SpectrumError(ValueError):
    """Invalid spectrum construction or evaluation request."""


def _check_band(f_ir: float, f_uv: float) -> None:
    if not (math.isfinite(f_ir) and math.isfinite(f_uv)):
        raise SpectrumError(f"band cutoffs must be finite, got [{f_ir}, {f_uv}]")
    if not (0.0 < f_ir < f_uv):
        raise SpectrumError(f"band must satisfy 0 < f_ir < f_uv, got [{f_ir}, {f_uv}]")


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided noise spectral density with hard band limits.

    ``amplitude`` is kind-dependent: for power_law it is the value of S_f at
    f = 1 Hz; for white the in-band level; for lorentzian the f -> 0 plateau
    (S_f = A / (1 + (f/f_corner)^2)).  Tabulated spectra interpolate
    log-log-linearly between knots and take their band from the knot range.
    Sum spectra evaluate as the pointwise sum of their children, each child
    restricted to its own band.
    """

    kind: str
    amplitude: float = 0.0
    exponent: float = 0.0
    f_ir: float = 0.0
    f_uv: float = 0.0
    f_corner: float = 0.0
    table: tuple[tuple[float, float], ...] = ()
    children: tuple["PowerSpectrum", ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpectrumError(f"unknown spectrum kind {self.kind!r}")
        if self.kind == "sum":
            if not self.children:
                raise SpectrumError("sum spectrum requires at least one child")
            object.__setattr__(self, "f_ir", min(c.f_ir for c in self.children))
            object.__setattr__(self, "f_uv", max(c.f_uv for c in self.children))
            return
        if self.kind == "tabulated":
            if len(self.table) < 2:
                raise SpectrumError("tabulated spectrum needs at least 2 knots")
            fs = np.array([k[0] for k in self.table], dtype=float)
            ss = np.array([k[1] for k in self.table], dtype=float)
            if not np.all(np.isfinite(fs)) or not np.all(np.isfinite(ss)):
                raise SpectrumError("tabulated knots must be finite")
            if np.any(fs <= 0.0) or np.any(np.diff(fs) <= 0.0):
                raise SpectrumError("knot frequencies must be positive and strictly increasing")
            if np.any(ss <= 0.0):
                raise SpectrumError("knot values must be positive (log-log interpolation)")
            object.__setattr__(self, "f_ir", float(fs[0]))
            object.__setattr__(self, "f_uv", float(fs[-1]))
            _check_band(self.f_ir, self.f_uv)
            return
        _check_band(self.f_ir, self.f_uv)
        if not math.isfinite(self.amplitude) or self.amplitude < 0.0:
            raise SpectrumError(f"amplitude must be finite and >= 0, got {self.amplitude}")
        if self.kind == "power_law":
            if not math.isfinite(self.exponent) or self.exponent < 0.0:
                raise SpectrumError(f"exponent must be finite and >= 0, got {self.exponent}")
        if self.kind == "lorentzian" and not self.f_corner > 0.0:
            raise SpectrumError("lorentzian needs f_corner > 0")

    @property
    def spectrum_id(self) -> str:
        if self.label:
            return self.label
        if self.kind == "power_law":
            return (f"power_law(A={self.amplitude:.6g},alpha={self.exponent:.6g},"
                    f"band=[{self.f_ir:.6g},{self.f_uv:.6g}]Hz)")
        if self.kind == "white":
            return f"white(S0={self.amplitude:.6g},band=[{self.f_ir:.6g},{self.f_uv:.6g}]Hz)"
        if self.kind == "lorentzian":
            return (f"lorentzian(A={self.amplitude:.6g},f_c={self.f_corner:.6g},"
                    f"band=[{self.f_ir:.6g},{self.f_uv:.6g}]Hz)")
        if self.kind == "tabulated":
            return f"tabulated({len(self.table)} knots,band=[{self.f_ir:.6g},{self.f_uv:.6g}]Hz)"
        return "sum(" + "+".join(c.spectrum_id for c in self.children) + ")"

    def band_edges_hz(self) -> list[float]:
        """All band discontinuities (own plus children's), sorted and deduplicated."""
        edges = {self.f_ir, self.f_uv}
        for c in self.children:
            edges.update(c.band_edges_hz())
        return sorted(edges)


def make_power_law(amplitude: float, exponent: float, f_ir: float, f_uv: float,
                   label: str = "") -> PowerSpectrum:
    """S_f(f) = A * f^-alpha on [f_ir, f_uv], zero outside.

    ``amplitude`` is the one-sided density at f = 1 Hz in (rad/s)^2/Hz.
    A positive IR cutoff is mandatory: for alpha >= 1 the decoherence
    integrand diverges as omega -> 0 otherwise.
    """
    return PowerSpectrum("power_law", amplitude=float(amplitude), exponent=float(exponent),
                         f_ir=float(f_ir), f_uv=float(f_uv), label=label)


def make_white(level: float, f_ir: float, f_uv: float, label: str = "") -> PowerSpectrum:
    """Band-limited white spectrum S_f = S0 on [f_ir, f_uv]."""
    return PowerSpectrum("white", amplitude=float(level), f_ir=float(f_ir),
                         f_uv=float(f_uv), label=label)


def make_lorentzian(plateau: float, f_corner: float, f_ir: float, f_uv: float,
                    label: str = "") -> PowerSpectrum:
    """S_f(f) = A / (1 + (f/f_corner)^2) on [f_ir, f_uv].

    This is the one-sided spectrum of an Ornstein-Uhlenbeck process with
    relaxation rate theta = 2 pi f_corner and variance A * theta / 4
    (before band truncation), which gives the time-domain oracle an
    analytic cross-check.
    """
    return PowerSpectrum("lorentzian", amplitude=float(plateau), f_corner=float(f_corner),
                         f_ir=float(f_ir), f_uv=float(f_uv), label=label)


def make_tabulated(knots, label: str = "") -> PowerSpectrum:
    """Spectrum from (f_hz, s_f) knots; log-log linear between knots."""
    table = tuple((float(f), float(s)) for f, s in knots)
    return PowerSpectrum("tabulated", table=table, label=label)


def combine(spectra, label: str = "") -> PowerSpectrum:
    """Sum spectrum of mutually uncorrelated sources; band is the union."""
    children = tuple(spectra)
    if not children:
        raise SpectrumError("combine() needs a nonempty list of spectra")
    return PowerSpectrum("sum", children=children, label=label)


def scale(s: PowerSpectrum, factor: float) -> PowerSpectrum:
    """Return the spectrum multiplied by a nonnegative factor."""
    if not math.isfinite(factor) or factor < 0.0:
        raise SpectrumError(f"scale factor must be finite and >= 0, got {factor}")
    if s.kind == "sum":
        return replace(s, children=tuple(scale(c, factor) for c in s.children))
    if s.kind == "tabulated":
        return replace(s, table=tuple((f, v * factor) for f, v in s.table))
    return replace(s, amplitude=s.amplitude * factor)


def eval_one_sided(s: PowerSpectrum, f) -> np.ndarray:
    """One-sided density S_f(f) in (rad/s)^2/Hz; exactly zero out of band."""
    f = np.asarray(f, dtype=float)
    shape = f.shape
    fa = np.atleast_1d(f)
    if s.kind == "sum":
        out = np.zeros_like(fa)
        for c in s.children:
            out += np.atleast_1d(eval_one_sided(c, fa))
        return out.reshape(shape)
    out = np.zeros_like(fa)
    mask = (fa >= s.f_ir) & (fa <= s.f_uv)
    if np.any(mask):
        fm = fa[mask]
        if s.kind == "power_law":
            vals = s.amplitude * fm ** (-s.exponent)
        elif s.kind == "white":
            vals = np.full_like(fm, s.amplitude)
        elif s.kind == "lorentzian":
            vals = s.amplitude / (1.0 + (fm / s.f_corner) ** 2)
        else:  # tabulated
            fs = np.array([k[0] for k in s.table])
            ss = np.array([k[1] for k in s.table])
            vals = 10.0 ** np.interp(np.log10(fm), np.log10(fs), np.log10(ss))
            # interpolation must hit the stored values exactly at the knots
            idx = np.searchsorted(fs, fm)
            idx_c = np.minimum(idx, len(fs) - 1)
            exact = fs[idx_c] == fm
            vals[exact] = ss[idx_c[exact]]
        out[mask] = vals
    return out.reshape(shape)


def eval_angular(s: PowerSpectrum, omega) -> np.ndarray:
    """Two-sided angular density S(omega) = S_f(omega/2pi)/2, units (rad/s)^2 s."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * eval_one_sided(s, omega / TWO_PI)


def _power_law_integral(amp, alpha, a, b):
    """int_a^b amp * f^-alpha df, vectorized in all arguments."""
    amp = np.asarray(amp, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = 1.0 - alpha
    near_log = np.abs(p) < 1e-12
    p_safe = np.where(near_log, 1.0, p)
    return amp * np.where(near_log, np.log(b / a), (b**p_safe - a**p_safe) / p_safe)


def band_power(s: PowerSpectrum, f_lo, f_hi) -> np.ndarray:
    """int S_f df over [f_lo, f_hi] clipped to the band (closed forms).

    Vectorized over the bounds; used by the noise synthesizer to assign
    each frequency bin its exact share of the spectral power.
    """
    f_lo = np.asarray(f_lo, dtype=float)
    f_hi = np.asarray(f_hi, dtype=float)
    if s.kind == "sum":
        out = np.zeros(np.broadcast(f_lo, f_hi).shape)
        for c in s.children:
            out = out + band_power(c, f_lo, f_hi)
        return out
    a = np.clip(f_lo, s.f_ir, s.f_uv)
    b = np.clip(f_hi, s.f_ir, s.f_uv)
    empty = b <= a
    a = np.where(empty, s.f_ir, a)
    b = np.where(empty, s.f_uv, b)
    if s.kind == "white":
        out = s.amplitude * (b - a)
    elif s.kind == "power_law":
        out = _power_law_integral(s.amplitude, s.exponent, a, b)
    elif s.kind == "lorentzian":
        out = s.amplitude * s.f_corner * (np.arctan(b / s.f_corner)
                                          - np.arctan(a / s.f_corner))
    else:  # tabulated: each log-log segment is an exact power law
        fs = np.array([k[0] for k in s.table])
        ss = np.array([k[1] for k in s.table])
        alphas = -np.log(ss[1:] / ss[:-1]) / np.log(fs[1:] / fs[:-1])
        amps = ss[:-1] * fs[:-1] ** alphas
        # cumulative power up to each knot
        cum = np.zeros(len(fs))
        for i in range(len(fs) - 1):
            cum[i + 1] = cum[i] + float(
                _power_law_integral(amps[i], alphas[i], fs[i], fs[i + 1]))

        def cum_at(f):
            f = np.asarray(f, dtype=float)
            i = np.clip(np.searchsorted(fs, f, side="right") - 1, 0, len(fs) - 2)
            return cum[i] + _power_law_integral(amps[i], alphas[i], fs[i], f)

        out = cum_at(b) - cum_at(a)
    return np.where(empty, 0.0, out)


def variance(s: PowerSpectrum) -> float:
    """Var[eps] = integral of S_f over the band, in (rad/s)^2."""
    return float(band_power(s, s.f_ir, s.f_uv))


def paper_intensity_spectrum(e_l: float, label: str = PAPER_PRESET_NAME) -> PowerSpectrum:
    """Trap-laser intensity-noise preset scaled by a coupling E_L in rad/s.

    The stored density is S_f(f) = E_L^2 * 10^-8.5 * f^(-5/3) between the
    trap-lifetime IR cutoff (0.016 rad/s) and 1 kHz.
    """
    return make_power_law(e_l * e_l * PAPER_REL_AMPLITUDE, PAPER_EXPONENT,
                          PAPER_F_IR, PAPER_F_UV, label=label)


def from_csv(path, label: str = "") -> PowerSpectrum:
    """Load a tabulated spectrum from a two-column CSV with header ``f_hz,s_f``."""
    knots = []
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.lstrip().startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["f_hz", "s_f"]:
            raise SpectrumError(f"{path}: expected header 'f_hz,s_f', got {header}")
        for row in reader:
            if not row or not row[0].strip():
                continue
            knots.append((float(row[0]), float(row[1])))
    return make_tabulated(knots, label=label or str(path))


def to_csv(s: PowerSpectrum, path, n_points: int = 200) -> None:
    """Dump S_f sampled log-uniformly across the band (header ``f_hz,s_f``)."""
    fs = np.geomspace(s.f_ir, s.f_uv, n_points)
    vals = eval_one_sided(s, fs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f_hz", "s_f"])
        for f, v in zip(fs, vals):
            writer.writerow([repr(float(f)), repr(float(v))])
