import os
import subprocess
import sys

import numpy as np
import pytest

from covpair import _backend, _kernels_py, make_structure

try:
    from covpair import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


@needs_ext
@pytest.mark.skipif(bool(os.environ.get("COVPAIR_PURE_PYTHON")), reason="fallback forced")
def test_extension_selected_by_default():
    assert _backend.BACKEND == "cython"


def test_pure_python_switch():
    env = dict(os.environ, COVPAIR_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import covpair; print(covpair.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_ext
def test_bessel_parity():
    x = np.geomspace(1e-8, 700, 500)
    for twice in range(0, 21):
        np.testing.assert_allclose(_ckernels.bessel_k(twice, x), _kernels_py.bessel_k(twice, x), rtol=1e-14)
        np.testing.assert_allclose(
            _ckernels.log_kv_scaled(twice, x), _kernels_py.log_kv_scaled(twice, x), rtol=1e-14, atol=1e-14
        )


@needs_ext
@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 30])
def test_density_parity(n):
    rng = np.random.default_rng(n)
    for rho, sigma in [(0.5, 0.5), (-0.3, 0.2), (0.0, 0.0), (0.6, 0.1)]:
        k = make_structure(rho, sigma).constants
        x, y = rng.normal(0, 3, (2, 300))
        x[:3], y[:3] = 0.0, [0.0, 1e-12, -1e-9]
        a = _ckernels.density(n, k.lam, k.kappa, k.delta, k.alpha, x, y)
        b = _kernels_py.density(n, k.lam, k.kappa, k.delta, k.alpha, x, y)
        np.testing.assert_allclose(a, b, rtol=1e-13)


@needs_ext
def test_density_shapes_preserved():
    k = make_structure(0.5, 0.5).constants
    x = np.ones((3, 4))
    assert _ckernels.density(3, k.lam, k.kappa, k.delta, k.alpha, x, x).shape == (3, 4)
    assert _kernels_py.density(3, k.lam, k.kappa, k.delta, k.alpha, x, x).shape == (3, 4)
