"""Orthonormal input-function families and their quadrature rules.

Four families: indicator (Kronecker delta) over finite domains, complex
Fourier exponentials on the unit period, Hermite functions on the real line,
and normalized Legendre polynomials on [-1, 1].  Each has an identity Gram
matrix, which is what makes squared circuits built on them normalizable by
construction.  Hermite and Legendre values come from three-term recurrences
run directly on the normalized functions, so no factorial overflows occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Domain, Finite, Interval, RealLine, UnitPeriodic
from .errors import InputError, PrecisionError

# Exactness sentinel for rules that are exact finite sums.
EXACT_SUM_DEGREE = 2**31 - 1


def _check_size(size: int) -> None:
    if size < 1:
        raise InputError(f"basis needs size >= 1, got {size}")


@dataclass(frozen=True)
class Indicator:
    """Kronecker-delta basis over a finite domain; f_k(x) = delta(x, k)."""

    size: int

    def __post_init__(self):
        _check_size(self.size)

    @property
    def domain(self) -> Domain:
        return Finite(self.size)

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs)
        vals = np.rint(xs).astype(np.intp)
        if not np.all(np.equal(vals, xs)):
            raise InputError("indicator basis needs integer values")
        if vals.size and (vals.min() < 0 or vals.max() >= self.size):
            raise InputError(f"value outside finite domain of size {self.size}")
        out = np.zeros((self.size, vals.shape[0]), dtype=np.complex128)
        out[vals, np.arange(vals.shape[0])] = 1.0
        return out

    def eval(self, x) -> np.ndarray:
        return self.eval_batch(np.asarray([x]))[:, 0]


@dataclass(frozen=True)
class Fourier:
    """Complex exponentials on the unit period: f_k(x) = exp(2*pi*i*k*x)."""

    size: int

    def __post_init__(self):
        _check_size(self.size)

    @property
    def domain(self) -> Domain:
        return UnitPeriodic()

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not np.all(np.isfinite(xs)):
            raise InputError("fourier basis needs finite values")
        k = np.arange(self.size)[:, np.newaxis]
        return np.exp(2j * np.pi * k * xs[np.newaxis, :])

    def eval(self, x) -> np.ndarray:
        return self.eval_batch(np.asarray([x]))[:, 0]


@dataclass(frozen=True)
class Hermite:
    """Hermite functions psi_k(x) = (2^k k! sqrt(pi))^(-1/2) H_k(x) e^(-x^2/2)."""

    size: int

    def __post_init__(self):
        _check_size(self.size)

    @property
    def domain(self) -> Domain:
        return RealLine()

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not np.all(np.isfinite(xs)):
            raise InputError("hermite basis needs finite values")
        n = xs.shape[0]
        out = np.empty((self.size, n), dtype=np.float64)
        out[0] = math.pi ** -0.25 * np.exp(-0.5 * xs**2)
        if self.size > 1:
            out[1] = math.sqrt(2.0) * xs * out[0]
        for k in range(1, self.size - 1):
            out[k + 1] = xs * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
        return out.astype(np.complex128)

    def eval(self, x) -> np.ndarray:
        return self.eval_batch(np.asarray([x]))[:, 0]


@dataclass(frozen=True)
class Legendre:
    """Normalized Legendre polynomials sqrt((2k+1)/2) P_k(x) on [-1, 1]."""

    size: int

    def __post_init__(self):
        _check_size(self.size)

    @property
    def domain(self) -> Domain:
        return Interval(-1.0, 1.0)

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not np.all(np.isfinite(xs)) or (xs.size and (xs.min() < -1.0 or xs.max() > 1.0)):
            raise InputError("legendre basis needs values in [-1, 1]")
        n = xs.shape[0]
        p = np.empty((self.size, n), dtype=np.float64)
        p[0] = 1.0
        if self.size > 1:
            p[1] = xs
        for k in range(1, self.size - 1):
            p[k + 1] = ((2 * k + 1) * xs * p[k] - k * p[k - 1]) / (k + 1)
        norms = np.sqrt((2 * np.arange(self.size) + 1) / 2.0)
        return (norms[:, np.newaxis] * p).astype(np.complex128)

    def eval(self, x) -> np.ndarray:
        return self.eval_batch(np.asarray([x]))[:, 0]


BasisSpec = Indicator | Fourier | Hermite | Legendre
ORTHONORMAL_FAMILIES = (Indicator, Fourier, Hermite, Legendre)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights, exact through `exact_degree`."""

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise InputError("quadrature nodes and weights must be equal-length vectors")
        if weights.size and weights.min() <= 0:
            raise InputError("quadrature weights must be positive")


def eval_basis(spec, x) -> np.ndarray:
    """Evaluate all basis functions of `spec` at a single point."""
    return spec.eval(x)


def gram(spec) -> np.ndarray:
    """Analytic Gram matrix of an orthonormal family: exactly the identity."""
    if not isinstance(spec, ORTHONORMAL_FAMILIES):
        raise InputError(f"no analytic Gram for basis {type(spec).__name__}")
    return np.eye(spec.size, dtype=np.complex128)


def quadrature_rule(spec, order: int) -> QuadratureRule:
    """Quadrature rule integrating products f_i f_j* of `spec` exactly.

    Indicator: the exact finite sum over the domain (order ignored).
    Fourier: the periodic trapezoid rule with `order` nodes, exact for
    trigonometric degree order - 1.  Hermite: Gauss-Hermite with the e^(-x^2)
    weight folded into the quadrature weights.  Legendre: Gauss-Legendre.
    """
    if order < 1:
        raise PrecisionError(f"quadrature order must be >= 1, got {order}")
    if isinstance(spec, Indicator):
        v = spec.size
        return QuadratureRule(np.arange(v, dtype=np.float64), np.ones(v), EXACT_SUM_DEGREE)
    if isinstance(spec, Fourier):
        nodes = np.arange(order, dtype=np.float64) / order
        return QuadratureRule(nodes, np.full(order, 1.0 / order), order - 1)
    if isinstance(spec, Hermite):
        x, w = np.polynomial.hermite.hermgauss(order)
        return QuadratureRule(x, w * np.exp(x**2), 2 * order - 1)
    if isinstance(spec, Legendre):
        x, w = np.polynomial.legendre.leggauss(order)
        return QuadratureRule(x, w, 2 * order - 1)
    raise InputError(f"no quadrature rule for basis {type(spec).__name__}")


def min_gram_order(spec) -> int:
    """Smallest quadrature order documented to reproduce the Gram matrix."""
    if isinstance(spec, Indicator):
        return 1
    if isinstance(spec, Fourier):
        return 2 * spec.size
    return spec.size


def default_quadrature_order(spec) -> int:
    """Oversampled order used by the quadrature oracle."""
    if isinstance(spec, Indicator):
        return spec.size
    if isinstance(spec, Hermite):
        return 4 * spec.size
    return 2 * spec.size


def gram_numeric(spec, order: int) -> np.ndarray:
    """Gram matrix by quadrature; within 1e-8 of the identity at valid orders.

    Raises PrecisionError when `order` is below the documented minimum for
    the family (see :func:`min_gram_order`).
    """
    if not isinstance(spec, ORTHONORMAL_FAMILIES):
        raise InputError(f"no numeric Gram for basis {type(spec).__name__}")
    needed = min_gram_order(spec)
    if order < needed:
        raise PrecisionError(
            f"order {order} too small for {type(spec).__name__}({spec.size}); need >= {needed}"
        )
    rule = quadrature_rule(spec, order)
    f = spec.eval_batch(rule.nodes)
    return (f * rule.weights[np.newaxis, :]) @ f.conj().T
