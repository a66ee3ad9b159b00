"""Colorings, the symmetrized clustering polynomial f_N and its identities.

A coloring splits particles 0..N-1 into nu unlabeled groups of K. The
clustering polynomial is

    f_N(z) = (nu!)^{-(K-1)} * sum over colorings of prod_groups prod_{j<k in group} (z_j - z_k)^mu

with the edge orientation fixed to j < k (global particle order).

Evaluation goes through a table of the K-subsets that occur as groups:
per-subset log edge products are one real matmul against a subset/pair
incidence matrix, and each coloring term is a sum of nu subset entries.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .logcomplex import LogComplex, logsumexp_complex

Coloring = tuple[tuple[int, ...], ...]


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True)
class ClusterPolySpec:
    mu: int
    nu: int
    k_per_color: int

    def __post_init__(self):
        if self.mu < 0 or self.nu < 1 or self.k_per_color < 0:
            raise InvalidInput("need mu >= 0, nu >= 1, K >= 0")

    @property
    def n(self) -> int:
        return self.nu * self.k_per_color

    @property
    def log_normalization(self) -> float:
        return -(self.k_per_color - 1) * math.lgamma(self.nu + 1) if self.k_per_color else 0.0

    @property
    def normalization(self) -> Fraction:
        return Fraction(1, math.factorial(self.nu) ** (self.k_per_color - 1)) if self.k_per_color else Fraction(1)


def coloring_count(n: int, nu: int) -> int:
    """n! / (nu! (K!)^nu) in exact integer arithmetic."""
    if nu < 1 or n % nu:
        raise InvalidInput(f"nu={nu} does not divide N={n}")
    k = n // nu
    return math.factorial(n) // (math.factorial(nu) * math.factorial(k) ** nu)


def enumerate_colorings(n: int, nu: int) -> Iterator[Coloring]:
    """Yield every canonical coloring once, lexicographically.

    Canonical: each group sorted, groups ordered by smallest element. The
    first remaining particle always opens the next group, which makes the
    stream duplicate-free without bookkeeping.
    """
    if nu < 1 or n % nu:
        raise InvalidInput(f"nu={nu} does not divide N={n}")
    k = n // nu
    if n == 0:
        yield ()
        return

    def rec(remaining: tuple[int, ...], acc: list[tuple[int, ...]]):
        if not remaining:
            yield tuple(acc)
            return
        head, rest = remaining[0], remaining[1:]
        for others in itertools.combinations(rest, k - 1):
            group = (head,) + others
            chosen = set(others)
            acc.append(group)
            yield from rec(tuple(i for i in rest if i not in chosen), acc)
            acc.pop()

    yield from rec(tuple(range(n)), [])


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


@dataclass(frozen=True)
class ColoringTable:
    """Dense lookup arrays for vectorized evaluation."""

    n: int
    nu: int
    subsets: np.ndarray  # (S, K) particle indices, ascending
    subset_pairs: np.ndarray  # (S, P) 0/1 incidence of within-subset pairs
    colorings: np.ndarray  # (C, nu) subset ids

    @property
    def k(self) -> int:
        return self.n // self.nu


@lru_cache(maxsize=32)
def coloring_table(n: int, nu: int) -> ColoringTable:
    index: dict[tuple[int, ...], int] = {}
    rows = []
    for coloring in enumerate_colorings(n, nu):
        rows.append([index.setdefault(g, len(index)) for g in coloring])
    k = n // nu
    subsets = np.array(sorted(index, key=index.get), dtype=np.intp).reshape(len(index), k)
    pos = {p: i for i, p in enumerate(pair_list(n))}
    inc = np.zeros((len(subsets), len(pos)))
    for s, group in enumerate(subsets):
        for a, b in itertools.combinations(group, 2):
            inc[s, pos[(a, b)]] = 1.0
    colorings = np.array(rows, dtype=np.intp).reshape(-1, nu)
    return ColoringTable(n, nu, subsets, inc, colorings)


# finite stand-in for log(0) so that 0 * log|0| in the incidence matmul stays 0
_LOG_ZERO = -1e300
_DEAD = -1e200


def pair_logs(z: np.ndarray, conjugated: bool = False) -> np.ndarray:
    """Complex log of z_j - z_k (j < k); shape ``z.shape[:-1] + (P,)``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    iu, ju = np.triu_indices(n, 1)
    d = z[..., iu] - z[..., ju]
    if conjugated:
        d = np.conj(d)
    mag = np.abs(d)
    with np.errstate(divide="ignore"):
        lm = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), _LOG_ZERO)
    return lm + 1j * np.angle(d)


def subset_edge_logs(table: ColoringTable, plogs: np.ndarray, mu: int) -> np.ndarray:
    """mu * sum of pair logs inside each subset; shape ``batch + (S,)``."""
    if table.subset_pairs.shape[1] == 0:
        return np.zeros(plogs.shape[:-1] + (len(table.subsets),), dtype=complex)
    re = plogs.real @ table.subset_pairs.T
    im = plogs.imag @ table.subset_pairs.T
    return mu * (re + 1j * im)


def coloring_sum(table: ColoringTable, subset_logs: np.ndarray, log_norm: float) -> np.ndarray:
    """log of norm * sum_c prod_q exp(subset_logs[id_cq])."""
    terms = np.sum(subset_logs[..., table.colorings], axis=-1)
    terms = np.where(terms.real < _DEAD, complex(-np.inf, 0.0), terms)
    return logsumexp_complex(terms, axis=-1) + log_norm


def _check_points(points: np.ndarray, n: int):
    if points.shape[-1] != n:
        raise InvalidInput(f"expected {n} points, got {points.shape[-1]}")
    if np.any(np.isnan(points)):
        raise InvalidInput("NaN in points")


def cluster_poly_log(spec: ClusterPolySpec, points, conjugated: bool = False) -> np.ndarray:
    """Complex log of f_N; vectorized over leading axes of ``points``."""
    points = np.asarray(points, dtype=complex)
    _check_points(points, spec.n)
    if spec.k_per_color <= 1:
        return np.full(points.shape[:-1], complex(spec.log_normalization, 0.0))
    table = coloring_table(spec.n, spec.nu)
    plogs = pair_logs(points, conjugated)
    return coloring_sum(table, subset_edge_logs(table, plogs, spec.mu), spec.log_normalization)


def eval_cluster_poly(spec: ClusterPolySpec, points, conjugated: bool = False) -> LogComplex:
    return LogComplex.from_clog(cluster_poly_log(spec, points, conjugated))


def polynomial_degree(spec: ClusterPolySpec) -> int:
    k = spec.k_per_color
    return spec.mu * spec.nu * k * (k - 1) // 2


# -- exact Gaussian-rational path --------------------------------------------

@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, tuple):
            return cls(Fraction(value[0]), Fraction(value[1]))
        return cls(Fraction(value))

    def __add__(self, o):
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __pow__(self, k: int):
        out = GaussianRational(Fraction(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, f: Fraction) -> "GaussianRational":
        return GaussianRational(self.re * f, self.im * f)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def cluster_poly_exact(spec: ClusterPolySpec, points: Sequence, conjugated: bool = False) -> GaussianRational:
    pts = [GaussianRational.of(p) for p in points]
    if conjugated:
        pts = [p.conj() for p in pts]
    if len(pts) != spec.n:
        raise InvalidInput(f"expected {spec.n} points")
    total = GaussianRational(Fraction(0))
    for coloring in enumerate_colorings(spec.n, spec.nu):
        term = GaussianRational(Fraction(1))
        for group in coloring:
            for a, b in itertools.combinations(group, 2):
                term = term * (pts[a] - pts[b]) ** spec.mu
        total = total + term
    return total.scale(spec.normalization)


# -- identities -----------------------------------------------------------------

def _relative_residual_log(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    both_zero = np.isneginf(lhs.real) & np.isneginf(rhs.real)
    with np.errstate(invalid="ignore"):
        res = np.abs(np.expm1(lhs - rhs))
    return np.where(both_zero, 0.0, res)


def _exact_residual(lhs: GaussianRational, rhs: GaussianRational) -> Fraction:
    diff = lhs - rhs
    if diff.abs2() == 0:
        return Fraction(0)
    if rhs.abs2() == 0:
        return diff.abs2()
    # squared relative residual keeps the result rational
    return diff.abs2() / rhs.abs2()


def verify_clustering_identity(spec: ClusterPolySpec, zeta, rest, exact: bool = False):
    """Residual of f_N(zeta x nu, rest) against prod (zeta - z_j)^mu f_{N-nu}(rest).

    Float mode returns |lhs/rhs - 1| per batch entry. Exact mode returns the
    squared relative residual as a Fraction (0 iff the identity holds exactly).
    """
    if spec.k_per_color < 1:
        raise InvalidInput("need K >= 1")
    smaller = ClusterPolySpec(spec.mu, spec.nu, spec.k_per_color - 1)
    if exact:
        zeta = GaussianRational.of(zeta)
        rest = [GaussianRational.of(p) for p in rest]
        lhs = cluster_poly_exact(spec, [zeta] * spec.nu + rest)
        prod = GaussianRational(Fraction(1))
        for p in rest:
            prod = prod * (zeta - p) ** spec.mu
        rhs = prod * cluster_poly_exact(smaller, rest)
        return _exact_residual(lhs, rhs)
    rest = np.asarray(rest, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    full = np.concatenate([np.repeat(zeta[..., None], spec.nu, axis=-1), rest], axis=-1)
    lhs = cluster_poly_log(spec, full)
    with np.errstate(divide="ignore"):
        prod = spec.mu * np.sum(np.log(zeta[..., None] - rest), axis=-1)
    rhs = prod + cluster_poly_log(smaller, rest)
    return _relative_residual_log(lhs, rhs)


def collapse_points(spec: ClusterPolySpec, centers) -> np.ndarray:
    """nu copies of each center, center q occupying slots q*nu .. q*nu+nu-1."""
    centers = np.asarray(centers, dtype=complex)
    return np.repeat(centers, spec.nu, axis=-1)


def laughlin_log(centers, exponent: int) -> np.ndarray:
    centers = np.asarray(centers, dtype=complex)
    k = centers.shape[-1]
    if k < 2:
        return np.zeros(centers.shape[:-1], dtype=complex)
    iu, ju = np.triu_indices(k, 1)
    return exponent * np.sum(np.log(centers[..., iu] - centers[..., ju]), axis=-1)


def verify_laughlin_collapse(spec: ClusterPolySpec, cluster_positions, exact: bool = False):
    """Residual of f_N on nu-fold collapsed clusters against prod (zeta_p - zeta_q)^{nu mu}."""
    if exact:
        centers = [GaussianRational.of(c) for c in cluster_positions]
        if len(centers) != spec.k_per_color:
            raise InvalidInput("need K cluster positions")
        pts = [c for c in centers for _ in range(spec.nu)]
        lhs = cluster_poly_exact(spec, pts)
        rhs = GaussianRational(Fraction(1))
        for p, q in itertools.combinations(centers, 2):
            rhs = rhs * (p - q) ** (spec.nu * spec.mu)
        return _exact_residual(lhs, rhs)
    centers = np.asarray(cluster_positions, dtype=complex)
    if centers.shape[-1] != spec.k_per_color:
        raise InvalidInput("need K cluster positions")
    lhs = cluster_poly_log(spec, collapse_points(spec, centers))
    rhs = laughlin_log(centers, spec.nu * spec.mu)
    return _relative_residual_log(lhs, rhs)
