"""Backend equivalence and basic properties of the filter kernel."""
import numpy as np
import pytest

from dephasekit._kernels import BACKEND, _filter_py, filter_grid

try:
    from dephasekit._kernels import _filter_cy
except ImportError:
    _filter_cy = None

RNG = np.random.default_rng(20240811)


def _sequences():
    return {
        "fid": np.array([]),
        "se": np.array([0.5]),
        "cpmg2": np.array([0.25, 0.75]),
        "cpmg50": (np.arange(1, 51) - 0.5) / 50,
        "cpmg500": (np.arange(1, 501) - 0.5) / 500,
        "pdd6": np.arange(1, 7) / 7,
        "udd8": np.sin(np.pi * np.arange(1, 9) / 18) ** 2,
        "random": np.sort(RNG.uniform(0.001, 0.999, 37)),
    }


@pytest.mark.skipif(_filter_cy is None, reason="compiled kernel not built")
@pytest.mark.parametrize("name", list(_sequences()))
def test_backends_agree(name):
    fr = _sequences()[name]
    x = np.concatenate([[0.0, 1e-8, 0.5], RNG.uniform(0.0, 2.0e6, 20000)])
    a = _filter_cy.filter_grid(fr, x)
    b = _filter_py.filter_grid(fr, x)
    scaled = np.max(np.abs(a - b) / (1.0 + np.abs(b)))
    assert scaled < 5e-8, f"{name}: backend mismatch {scaled:.2e}"


def test_selected_backend_exposed():
    assert BACKEND in ("cython", "numpy")
    if _filter_cy is not None:
        assert BACKEND == "cython"


@pytest.mark.parametrize("impl", [m for m in (_filter_cy, _filter_py) if m is not None])
def test_zero_is_exact_and_bounded(impl):
    for name, fr in _sequences().items():
        n = len(fr)
        x = np.concatenate([[0.0], RNG.uniform(0, 1e4, 5000)])
        f = impl.filter_grid(fr, x)
        assert f[0] == 0.0, name
        assert np.all(f >= 0.0), name
        assert np.all(f <= 2.0 * (n + 2) ** 2), name


@pytest.mark.parametrize("impl", [m for m in (_filter_cy, _filter_py) if m is not None])
def test_fid_formula(impl):
    x = RNG.uniform(0, 100, 1000)
    assert np.allclose(impl.filter_grid(np.array([]), x),
                       2 * np.sin(x / 2) ** 2, rtol=0, atol=1e-12)


def test_scalar_shape():
    out = filter_grid(np.array([0.5]), 3.14)
    assert np.shape(out) == ()
    out2 = filter_grid(np.array([0.5]), np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert out2.shape == (2, 2)
