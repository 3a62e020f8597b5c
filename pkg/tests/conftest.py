import pytest

from dephasekit import coherence, spectra, trap


@pytest.fixture(scope="session")
def paper_spectrum_raw():
    """Intensity-noise spectrum with E_L from the bundled Rb trap preset."""
    shift = trap.differential_light_shift(trap.preset())
    return spectra.paper_intensity_spectrum(shift.e_l)


@pytest.fixture(scope="session")
def paper_spectrum_cal():
    """Same shape, amplitude rescaled so that FID T2 = 1.000 s exactly."""
    s = spectra.make_power_law(1.0, 5.0 / 3.0, spectra.PAPER_F_IR,
                               spectra.PAPER_F_UV, label="paper-yag-1f-cal")
    return coherence.calibrate_to_t2(s, t2_target=1.0, tol=1e-8)
