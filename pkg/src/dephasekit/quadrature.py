"""Oscillation-aware quadrature for the decoherence exponent.

Computes

    chi(t) = (1/pi) int_{omega_ir}^{omega_uv} S(omega) F(omega t) / omega^2 domega

with S the two-sided angular density of a band-limited spectrum and F the
generic sequence filter.  In the dimensionless variable x = omega * t the
filter is a trigonometric polynomial whose frequencies never exceed 1 (its
terms are e^{i x (s_j - s_k)} with s in [0, 1]), so fixed-order
Gauss-Legendre panels a few oscillation periods wide resolve it to spectral
accuracy.  The grid is hybrid: logarithmic panels below the first filter
lobe (x < 2), oscillation-resolved linear panels above, with panel widths
at most an eighth of the worst-case beat structure after one refinement.

Far above the main filter resonances the integrand's oscillation averages
out; there the oscillating F is replaced by its exact asymptotic mean
<F> = 2 n + 1 and the remaining smooth integral is done on cheap log
panels.  The replacement point is chosen so that the mass of one whole
filter resonance (4 pi (n+1)^2 in x units, the integrated height of a
principal CPMG-type peak) contributes less than a small fraction of the
tolerance; the same mass enters the reported error estimate.

Error control is by Richardson comparison of the oscillatory part at panel
widths h and h/2 plus embedded low/high-order differences in the smooth
regions.  The evaluation budget (default 4e6 integrand points) aborts with
a QuadratureError carrying the partial result and the achieved estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import spectra
from ._kernels import filter_grid
from .sequences import PulseSequence

TWO_PI = 2.0 * math.pi

X_SWITCH = 2.0            # log panels below, oscillation-resolved above
OSC_PANEL_WIDTH = 6.0 * math.pi
OSC_ORDER = 20
LOG_PANELS_PER_DECADE = 8
LOG_ORDER = 16
BLOCK_PANELS = 256
DEFAULT_BUDGET = 4_000_000
MAX_HALVINGS = 4


class QuadratureError(RuntimeError):
    """Budget exhausted before reaching the requested tolerance."""

    def __init__(self, message: str, result: "ChiResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ChiResult:
    value: float
    error: float
    n_evals: int
    converged: bool


@lru_cache(maxsize=None)
def _gl(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def _panel_nodes(edges: np.ndarray, order: int):
    """Gauss-Legendre nodes/weights for panels between consecutive edges."""
    u, w = _gl(order)
    centers = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = centers[:, None] + half[:, None] * u[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


class _Integrand:
    """g(x) = S(x/t) F(x) / (x/t)^2 / (pi t); chi = int g dx over x = omega t."""

    def __init__(self, spectrum: spectra.PowerSpectrum, seq: PulseSequence, t: float):
        self.spectrum = spectrum
        self.fractions = np.asarray(seq.fractions, dtype=float)
        self.t = t
        self.n_evals = 0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        self.n_evals += x.size
        omega = x / self.t
        s = spectra.eval_angular(self.spectrum, omega)
        f = filter_grid(self.fractions, x)
        return s * f / (omega * omega) / (math.pi * self.t)

    def smooth(self, x: np.ndarray) -> np.ndarray:
        """Envelope with F replaced by 1 (multiplied by <F> at the call site)."""
        self.n_evals += x.size
        omega = x / self.t
        s = spectra.eval_angular(self.spectrum, omega)
        return s / (omega * omega) / (math.pi * self.t)


def _log_region(g: _Integrand, xa: float, xb: float, per_decade: int):
    """Smooth low-x part on log-spaced panels; returns (value, error_estimate)."""
    decades = math.log10(xb / xa)
    n_panels = max(2, int(math.ceil(per_decade * decades)))
    edges = np.geomspace(xa, xb, n_panels + 1)
    nodes, weights = _panel_nodes(edges, LOG_ORDER)
    hi = float(np.sum(g(nodes.ravel()) * weights.ravel()))
    nodes8, weights8 = _panel_nodes(edges, LOG_ORDER // 2)
    lo = float(np.sum(g(nodes8.ravel()) * weights8.ravel()))
    return hi, abs(hi - lo)


def _osc_pass(g: _Integrand, xa: float, xb: float, h: float, budget_left: int):
    """Fixed-width panels over [xa, xb]; returns the integral or None if over budget."""
    n_panels = max(1, int(math.ceil((xb - xa) / h)))
    if n_panels * OSC_ORDER > budget_left:
        return None
    total = 0.0
    edges = np.linspace(xa, xb, n_panels + 1)
    for i0 in range(0, n_panels, BLOCK_PANELS):
        block = edges[i0:min(i0 + BLOCK_PANELS, n_panels) + 1]
        nodes, weights = _panel_nodes(block, OSC_ORDER)
        total += float(np.sum(g(nodes.ravel()) * weights.ravel()))
    return total


def chi_integral(spectrum: spectra.PowerSpectrum, seq: PulseSequence, t: float,
                 tol: float = 1e-6, budget: int = DEFAULT_BUDGET) -> ChiResult:
    """Decoherence exponent chi(t) with relative error <= tol on chi.

    Raises QuadratureError when the evaluation budget is exhausted first;
    the exception carries the partial ChiResult with the achieved estimate.
    """
    if not (t > 0.0) or not math.isfinite(t):
        raise ValueError(f"t must be positive and finite, got {t}")
    if not (0.0 < tol <= 1e-3):
        raise ValueError(f"tol must be in (0, 1e-3], got {tol}")

    n = seq.n_pulses
    mean_f = 2.0 * n + 1.0
    peak_mass = 4.0 * math.pi * (n + 1.0) ** 2
    gaps = np.diff(np.concatenate(([0.0], np.asarray(seq.fractions, float), [1.0])))
    slow_period = TWO_PI / float(np.min(gaps))

    edges_hz = [f for f in spectrum.band_edges_hz()
                if spectrum.f_ir <= f <= spectrum.f_uv]
    seg_x = [TWO_PI * f * t for f in edges_hz]
    n_seg = max(1, len(seg_x) - 1)
    scale = 1.0 / n_seg

    total = 0.0
    err = 0.0
    g = _Integrand(spectrum, seq, t)

    for xa, xb in zip(seg_x[:-1], seg_x[1:]):
        if xb <= xa:
            continue
        # smooth sub-oscillation region
        x_lo_end = min(xb, X_SWITCH)
        if xa < x_lo_end:
            val, est = _log_region(g, xa, x_lo_end, LOG_PANELS_PER_DECADE)
            if est > 0.2 * scale * tol * max(abs(total + val), 1e-300):
                val, est = _log_region(g, xa, x_lo_end, 4 * LOG_PANELS_PER_DECADE)
            total += val
            err += est

        x_osc = max(xa, X_SWITCH)
        if xb <= x_osc:
            continue

        # oscillation-resolved region, processed in ascending blocks so that
        # the far tail can be replaced by its mean once it stops mattering
        h = OSC_PANEL_WIDTH
        n_panels = max(1, int(math.ceil((xb - x_osc) / h)))
        edges = np.linspace(x_osc, xb, n_panels + 1)

        # cheap smooth-envelope interpolant for the tail decision
        probe = np.geomspace(x_osc, xb, 513)
        env = g.smooth(probe)
        rev = np.cumsum((0.5 * (env[1:] + env[:-1]) * np.diff(probe))[::-1])[::-1]
        tail_smooth = np.concatenate((rev, [0.0]))  # int_x^xb of the envelope

        def tail_ok(x_val: float, chi_now: float) -> bool:
            if xb - x_val < 10.0 * slow_period or x_val < 20.0 * (n + 1.0):
                return False
            i = np.searchsorted(probe, x_val)
            i = min(i, len(probe) - 1)
            mean_tail = mean_f * tail_smooth[i]
            model = float(g.smooth(np.array([x_val]))[0]) * peak_mass
            return model <= 0.15 * scale * tol * max(chi_now + mean_tail, 1e-300)

        chi_osc = 0.0
        stop_idx = n_panels
        for i0 in range(0, n_panels, BLOCK_PANELS):
            i1 = min(i0 + BLOCK_PANELS, n_panels)
            if (i1 - i0) * OSC_ORDER > budget - g.n_evals:
                partial = ChiResult(total + chi_osc, math.inf, g.n_evals, False)
                raise QuadratureError(
                    f"evaluation budget {budget} exhausted at x={edges[i0]:.3g} "
                    f"of [{x_osc:.3g}, {xb:.3g}]", partial)
            block = edges[i0:i1 + 1]
            nodes, weights = _panel_nodes(block, OSC_ORDER)
            chi_osc += float(np.sum(g(nodes.ravel()) * weights.ravel()))
            if tail_ok(float(edges[i1]), total + chi_osc):
                stop_idx = i1
                break
        x_stop = float(edges[stop_idx])

        # Richardson control: recompute at h/2 (and finer if needed)
        prev = chi_osc
        est = math.inf
        for halving in range(1, MAX_HALVINGS + 1):
            nxt = _osc_pass(g, x_osc, x_stop, h / 2.0 ** halving, budget - g.n_evals)
            if nxt is None:
                partial = ChiResult(total + prev, est if math.isfinite(est) else math.inf,
                                    g.n_evals, False)
                raise QuadratureError(
                    f"evaluation budget {budget} exhausted during refinement", partial)
            est = abs(nxt - prev)
            prev = nxt
            if est <= 0.3 * scale * tol * max(abs(total + nxt), 1e-300):
                break
        total += prev
        err += est

        # replaced tail: mean filter value times the smooth envelope integral
        if x_stop < xb:
            gs = lambda x: g.smooth(x) * mean_f
            val, t_est = _log_region(gs, x_stop, xb, LOG_PANELS_PER_DECADE)
            model = float(g.smooth(np.array([x_stop]))[0]) * peak_mass
            total += val
            err += t_est + model

    converged = err <= tol * max(abs(total), 1e-300)
    result = ChiResult(total, err, g.n_evals, converged)
    if not converged:
        raise QuadratureError(
            f"quadrature did not reach tol={tol:g}: achieved relative error "
            f"{err / max(abs(total), 1e-300):.2e} after {g.n_evals} evaluations",
            result)
    return result
