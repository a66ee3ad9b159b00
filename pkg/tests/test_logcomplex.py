import numpy as np
from hypothesis import given, strategies as st

from anyonvmc.logcomplex import LogComplex, logsumexp_complex, wrap_phase

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_zero_encoding():
    z = LogComplex.from_complex(0.0)
    assert z.is_zero and z.to_complex() == 0
    assert (z * LogComplex.from_complex(3.0)).is_zero


def test_wrap_phase_range():
    p = wrap_phase(np.linspace(-20, 20, 1001))
    assert np.all(p >= -np.pi) and np.all(p < np.pi)


@given(finite, finite, finite, finite)
def test_multiplication_matches_complex(a, b, c, d):
    x, y = complex(a, b), complex(c, d)
    got = (LogComplex.from_complex(x) * LogComplex.from_complex(y)).to_complex()
    assert abs(got - x * y) <= 1e-12 * max(abs(x * y), 1e-300)


@given(finite, finite, finite, finite)
def test_addition_matches_complex(a, b, c, d):
    x, y = complex(a, b), complex(c, d)
    got = (LogComplex.from_complex(x) + LogComplex.from_complex(y)).to_complex()
    assert abs(got - (x + y)) <= 1e-12 * (abs(x) + abs(y)) + 1e-300


def test_logsumexp_spans_huge_range():
    clog = np.array([1000.0 + 0.3j, 0.0, -1000.0 + 1.0j])
    out = logsumexp_complex(clog)
    assert abs(out.real - 1000.0) < 1e-12 and abs(out.imag - 0.3) < 1e-12


def test_logsumexp_cancellation():
    # e^{i pi} is -1 only to rounding, so the sum lands at rounding level
    out = logsumexp_complex(np.array([0.0 + 0j, 0.0 + 1j * np.pi]))
    assert out.real < np.log(1e-15)
    assert np.isneginf(logsumexp_complex(np.array([-np.inf, -np.inf], dtype=complex)).real)
