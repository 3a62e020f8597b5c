"""Trap and atom physics: light-shift coupling, Zeeman shifts, pointing check.

Energies are expressed as angular frequencies (rad/s) throughout the
interfaces.  The differential light shift of the qubit splitting is

    E(r, t) = E_H + (pi c^2 Gamma / 2 omega0^3) (1/D'_F2 - 1/D'_F1) I(r, t),
    1/D'_F  = (2 + alpha g_F m_F) / Delta_2F + (1 - alpha g_F m_F) / Delta_1F,

with a single linewidth/transition-frequency prefactor (the D2 values in
the bundled preset).  Writing I(t) = I0 (1 + beta(t)) makes the splitting
fluctuation delta E(t) = E_L beta(t) with E_L the same coefficient
evaluated at I0; E_L^2 scales the relative-intensity noise spectrum in
``spectra.paper_intensity_spectrum``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import scipy.constants as sc

C = sc.c
HBAR = sc.hbar
KB = sc.k
MU_B = sc.physical_constants["Bohr magneton"][0]

PRESETS = ("rb87-yag-500uK",)


class TrapError(ValueError):
    """Invalid trap configuration."""


@dataclass(frozen=True)
class TrapConfig:
    """Atomic and laser parameters entering the light-shift formulas.

    Detunings are angular (rad/s) from the D1/D2 lines for the two qubit
    hyperfine levels; ``e_hyperfine`` is the zero-field splitting (rad/s).
    """

    gamma: float            # natural linewidth, rad/s
    omega0: float           # transition angular frequency, rad/s
    delta1_f1: float
    delta2_f1: float
    delta1_f2: float
    delta2_f2: float
    alpha_pol: int          # -1, 0, +1
    gf1: float
    mf1: float
    gf2: float
    mf2: float
    e_hyperfine: float      # rad/s
    peak_intensity: float   # W/m^2
    trap_depth: float       # rad/s (hbar = 1)
    waist: float            # m
    trap_omega: float       # rad/s
    mass: float             # kg
    name: str = ""

    def __post_init__(self):
        if self.alpha_pol not in (-1, 0, 1):
            raise TrapError(f"alpha_pol must be -1, 0 or 1, got {self.alpha_pol}")
        for label, d in (("delta1_f1", self.delta1_f1), ("delta2_f1", self.delta2_f1),
                         ("delta1_f2", self.delta1_f2), ("delta2_f2", self.delta2_f2)):
            if d == 0.0 or not math.isfinite(d):
                raise TrapError(f"{label} must be nonzero and finite")
        if not self.waist > 0.0:
            raise TrapError("waist must be positive")
        if not self.mass > 0.0:
            raise TrapError("mass must be positive")
        if self.peak_intensity < 0.0:
            raise TrapError("peak_intensity must be >= 0")


@dataclass(frozen=True)
class LightShiftResult:
    e_l: float       # rad/s, coefficient in delta E(t) = E_L beta(t)
    e_total: float   # rad/s, splitting at trap center


def inverse_effective_detuning(delta1: float, delta2: float, alpha_pol: float,
                               g_f: float, m_f: float) -> float:
    """1/D'_F = (2 + alpha g m)/Delta_2 + (1 - alpha g m)/Delta_1, in s."""
    if delta1 == 0.0 or delta2 == 0.0:
        raise TrapError("detunings must be nonzero")
    agm = alpha_pol * g_f * m_f
    return (2.0 + agm) / delta2 + (1.0 - agm) / delta1


def light_shift_prefactor(gamma: float, omega0: float) -> float:
    """pi c^2 Gamma / (2 omega0^3): J per (W/m^2) per (1/rad/s) of 1/D'."""
    return math.pi * C**2 * gamma / (2.0 * omega0**3)


def differential_light_shift(cfg: TrapConfig) -> LightShiftResult:
    """E_L and the total splitting at trap center for the configured intensity."""
    inv1 = inverse_effective_detuning(cfg.delta1_f1, cfg.delta2_f1,
                                      cfg.alpha_pol, cfg.gf1, cfg.mf1)
    inv2 = inverse_effective_detuning(cfg.delta1_f2, cfg.delta2_f2,
                                      cfg.alpha_pol, cfg.gf2, cfg.mf2)
    coef = light_shift_prefactor(cfg.gamma, cfg.omega0)
    e_l = coef * (inv2 - inv1) * cfg.peak_intensity / HBAR
    return LightShiftResult(e_l=e_l, e_total=cfg.e_hyperfine + e_l)


def zeeman_splitting(g_f: float, m_f: float, b_z: float) -> float:
    """First-order Zeeman shift m_F g_F mu_B B_z / hbar in rad/s."""
    for v in (g_f, m_f, b_z):
        if not math.isfinite(v):
            raise TrapError("zeeman_splitting needs finite inputs")
    return m_f * g_f * MU_B * b_z / HBAR


def adiabaticity_ratio(cfg: TrapConfig, gamma_amp: float, noise_freq: float) -> float:
    """Pointing-fluctuation adiabaticity ratio R; R << 1 means no dephasing.

    The trap center moving at v_t = gamma_amp * (2 pi noise_freq) drives the
    ground-to-first-band transition of the harmonic trap.  With the
    oscillator matrix element |<0| m w^2 (r - gamma) |1>| = m w^2
    sqrt(hbar / 2 m w) and gap hbar w, the condition collapses to

        R = v_t * sqrt(m / (2 hbar w)).
    """
    if gamma_amp < 0.0 or noise_freq < 0.0:
        raise TrapError("gamma_amp and noise_freq must be >= 0")
    if not (cfg.trap_omega > 0.0):
        raise TrapError("trap_omega must be positive")
    v_t = gamma_amp * (2.0 * math.pi * noise_freq)
    return v_t * math.sqrt(cfg.mass / (2.0 * HBAR * cfg.trap_omega))


def _config_from_atom_data(data: dict) -> TrapConfig:
    f_laser = C / data["trap_wavelength_m"]
    gamma = 2.0 * math.pi * data["gamma_d2_hz"]
    omega0 = 2.0 * math.pi * data["d2_frequency_hz"]

    def dets(f_offset_hz):
        d1 = 2.0 * math.pi * (f_laser - (data["d1_frequency_hz"] - f_offset_hz))
        d2 = 2.0 * math.pi * (f_laser - (data["d2_frequency_hz"] - f_offset_hz))
        return d1, d2

    d1_f1, d2_f1 = dets(data["f1_offset_hz"])
    d1_f2, d2_f2 = dets(data["f2_offset_hz"])

    depth_rad_s = KB * data["trap_depth_uK"] * 1e-6 / HBAR
    inv_f1 = inverse_effective_detuning(d1_f1, d2_f1, data["alpha_pol"],
                                        data["g_f1"], data["m_f1"])
    coef = light_shift_prefactor(gamma, omega0)
    peak_intensity = depth_rad_s * HBAR / (coef * abs(inv_f1))

    return TrapConfig(
        gamma=gamma, omega0=omega0,
        delta1_f1=d1_f1, delta2_f1=d2_f1, delta1_f2=d1_f2, delta2_f2=d2_f2,
        alpha_pol=int(data["alpha_pol"]),
        gf1=data["g_f1"], mf1=data["m_f1"], gf2=data["g_f2"], mf2=data["m_f2"],
        e_hyperfine=2.0 * math.pi * data["hyperfine_splitting_hz"],
        peak_intensity=peak_intensity,
        trap_depth=depth_rad_s,
        waist=data["waist_m"],
        trap_omega=data["trap_omega_rad_s"],
        mass=data["mass_kg"],
        name=data.get("name", ""),
    )


def preset(name: str = "rb87-yag-500uK") -> TrapConfig:
    """Bundled configuration; atomic reference data lives in data/*.json."""
    if name not in PRESETS:
        raise TrapError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    text = resources.files("dephasekit.data").joinpath("rb87_yag.json").read_text()
    return _config_from_atom_data(json.loads(text))


def load_config(path) -> TrapConfig:
    """TrapConfig from a JSON file: either raw TrapConfig fields (rad/s
    detunings etc.) or atom-data fields in the bundled-preset format."""
    with open(path) as fh:
        data = json.load(fh)
    if "delta1_f1" in data:
        known = {f for f in TrapConfig.__dataclass_fields__}
        return TrapConfig(**{k: v for k, v in data.items() if k in known})
    return _config_from_atom_data(data)
