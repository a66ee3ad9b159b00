"""Complex numbers stored as (log-magnitude, phase).

Arrays are numpy; scalars work too. ``log_mag == -inf`` encodes an exact
zero. Internally many routines pass around the complex logarithm
``log_mag + 1j * phase`` directly; ``LogComplex`` is the boundary type.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_phase(phase):
    """Reduce to [-pi, pi)."""
    return np.mod(np.asarray(phase, dtype=float) + np.pi, TWO_PI) - np.pi


@dataclass(frozen=True)
class LogComplex:
    log_mag: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "log_mag", np.asarray(self.log_mag, dtype=float))
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_clog(cls, clog) -> "LogComplex":
        clog = np.asarray(clog, dtype=complex)
        return cls(clog.real, np.where(np.isneginf(clog.real), 0.0, clog.imag))

    @classmethod
    def from_complex(cls, value) -> "LogComplex":
        value = np.asarray(value, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(value)), np.angle(value))

    @classmethod
    def one(cls, shape=()) -> "LogComplex":
        return cls(np.zeros(shape), np.zeros(shape))

    @property
    def clog(self) -> np.ndarray:
        return self.log_mag + 1j * self.phase

    @property
    def is_zero(self) -> np.ndarray:
        return np.isneginf(self.log_mag)

    def to_complex(self) -> np.ndarray:
        return np.exp(self.log_mag) * np.exp(1j * self.phase)

    def conj(self) -> "LogComplex":
        return LogComplex(self.log_mag, -self.phase)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __pow__(self, k) -> "LogComplex":
        return LogComplex(k * self.log_mag, k * self.phase)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        stacked = np.stack(np.broadcast_arrays(self.clog, other.clog), axis=-1)
        return LogComplex.from_clog(logsumexp_complex(stacked, axis=-1))


def logsumexp_complex(clog, axis=-1):
    """log(sum(exp(clog))) along ``axis`` for complex logarithms.

    The largest real part is pulled out before exponentiating, so terms
    spanning hundreds of orders of magnitude are summed safely. Rows that
    are entirely -inf, or that cancel exactly, return -inf.
    """
    clog = np.asarray(clog, dtype=complex)
    re = clog.real
    m = np.max(re, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore"):
        s = np.sum(np.exp(clog - m_safe), axis=axis)
    m_out = np.squeeze(m_safe, axis=axis)
    with np.errstate(divide="ignore"):
        out = np.log(s) + m_out
    dead = np.isneginf(np.squeeze(m, axis=axis)) | (s == 0)
    return np.where(dead, complex(-np.inf, 0.0), out)
