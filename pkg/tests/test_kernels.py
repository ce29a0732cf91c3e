import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rspcat import _kernels
from rspcat import fockcore as fc

pytestmark = pytest.mark.skipif("cython" not in _kernels.available_backends(), reason="compiled kernels not built")

PY = _kernels.get_backend("python")
CY = _kernels.get_backend("cython") if "cython" in _kernels.available_backends() else None


def test_backend_selection():
    assert _kernels.BACKEND in ("python", "cython")
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 300), st.lists(st.floats(-40, 40), min_size=1, max_size=5))
def test_hermite_backends_agree(nmax, xs):
    x = np.array(xs)
    a, b = PY.hermite_functions(nmax, x), CY.hermite_functions(nmax, x)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-300)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.7), st.floats(0.0, 0.6), st.floats(0.05, 1.0), st.floats(-1.0, 1.0))
def test_mixed_block_backends_agree(zeta, rs, eta, x0):
    psi = PY.hermite_functions(39, np.array([x0]))[:, 0]
    k = np.outer(psi, psi)
    a = PY.mixed_block(zeta, rs, eta, k, 20)
    b = CY.mixed_block(zeta, rs, eta, k, 20)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-15)
    wa = PY.alice_weights(zeta, rs, eta, 30, 40)
    wb = CY.alice_weights(zeta, rs, eta, 30, 40)
    assert np.allclose(wa, wb, rtol=1e-11, atol=1e-300)


def test_wigner_backends_agree():
    rho = fc.cat(1.2 + 0.4j, -1, 25).projector().elems
    xs = np.linspace(-4, 4, 17)
    ps = np.linspace(-3, 3, 13)
    assert np.allclose(PY.wigner_grid(rho, xs, ps), CY.wigner_grid(rho, xs, ps), atol=1e-13)
