"""Circuit squaring: build c2 computing |c(x)|^2 as another smooth,
decomposable circuit, plus integrated evaluation of c2 for naive
marginalization.

Each layer of c maps to one layer of c2 computing the Kronecker product of
the original output with its conjugate: input layers get a squared basis of
the K^2 products f_i f_j*, sum weights become W kron conj(W), Hadamard layers
stay Hadamard, and Kronecker layers pick up the regrouping permutation, fused
into the layer instead of materialized as an extra sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bases import ORTHONORMAL_FAMILIES
from .circuit import (
    Circuit,
    HadamardLayer,
    InputLayer,
    KroneckerLayer,
    SumLayer,
    topological_order,
    validate,
)
from .circuit import PermutedKroneckerLayer
from .errors import InputError, NumericalError, PreconditionError
from .linalg import kron, kron_square_perm

# Imaginary residue beyond this relative bound signals a bug, not roundoff.
IMAG_HARD_LIMIT = 1e-6
NEGATIVE_HARD_LIMIT = 1e-9


@dataclass(frozen=True)
class SquaredBasis:
    """Width-K^2 input functions f_i(x) * conj(f_j(x)) over one variable.

    Evaluates the base family once and takes the self-conjugate Kronecker
    product; the K^2 functions are never materialized separately.
    """

    base: object

    @property
    def size(self) -> int:
        return self.base.size**2

    @property
    def domain(self):
        return self.base.domain

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        f = self.base.eval_batch(xs)
        k, n = f.shape
        return np.einsum("ik,jk->ijk", f, f.conj()).reshape(k * k, n)

    def eval(self, x) -> np.ndarray:
        return self.eval_batch(np.asarray([x]))[:, 0]

    def integral_vector(self) -> np.ndarray:
        """Row-major vec of the base Gram matrix: vec(I_K) for the
        orthonormal families."""
        return np.eye(self.base.size, dtype=np.complex128).ravel()


@dataclass(frozen=True)
class SquaredCircuit:
    """The squared circuit plus the map from its layer ids back to c's."""

    circuit: Circuit
    origin: Mapping[int, int]


def _require_plain(c: Circuit) -> None:
    for lid, layer in c.layers.items():
        if isinstance(layer, PermutedKroneckerLayer):
            raise PreconditionError(f"layer {lid}: circuit is already squared")
        if isinstance(layer, InputLayer) and not isinstance(layer.basis, ORTHONORMAL_FAMILIES):
            raise PreconditionError(
                f"layer {lid}: basis {type(layer.basis).__name__} is not an orthonormal family"
            )


def square_circuit(c: Circuit) -> SquaredCircuit:
    """Build c2 with evaluate(c2, x) = |evaluate(c, x)|^2.

    Requires c to be structured-decomposable; otherwise the result would not
    be decomposable and tractable integration would be lost.
    """
    report = validate(c)
    if not report.structured_decomposable:
        raise PreconditionError("circuit must be structured-decomposable to square")
    _require_plain(c)
    layers: dict[int, object] = {}
    origin: dict[int, int] = {}
    for lid in topological_order(c):
        layer = c.layers[lid]
        if isinstance(layer, InputLayer):
            layers[lid] = InputLayer(layer.var, SquaredBasis(layer.basis))
        elif isinstance(layer, SumLayer):
            layers[lid] = SumLayer(layer.input, kron(layer.weights, layer.weights.conj()))
        elif isinstance(layer, HadamardLayer):
            layers[lid] = HadamardLayer(layer.inputs)
        elif isinstance(layer, KroneckerLayer):
            w1, w2 = (c.width(i) for i in layer.inputs)
            layers[lid] = PermutedKroneckerLayer(layer.inputs, kron_square_perm(w1, w2))
        origin[lid] = lid
    return SquaredCircuit(Circuit(layers, c.root, c.domains), origin)


def clamp_real(value: complex, context: str = "result") -> float:
    """Strip a tiny imaginary residue and a tiny negative dip from a value
    that is non-negative real in exact arithmetic."""
    denom = max(abs(value), 1.0)
    if abs(value.imag) > IMAG_HARD_LIMIT * denom:
        raise NumericalError(f"{context} has imaginary residue {value.imag:.3e} (value {value!r})")
    real = value.real
    if real < -NEGATIVE_HARD_LIMIT * denom:
        raise NumericalError(f"{context} is negative beyond roundoff: {real!r}")
    return max(real, 0.0)


def evaluate_squared_integrated(
    sq: SquaredCircuit,
    y: Mapping[int, object],
    z: frozenset[int],
    counter=None,
) -> float:
    """Integrate |c(y, .)|^2 over the variables in z by one pass over c2.

    Every input layer over a z-variable outputs vec of its base Gram matrix
    (the identity for orthonormal families); input layers over kept variables
    evaluate at y.  The result is real non-negative up to roundoff and is
    clamped accordingly.
    """
    c2 = sq.circuit
    z = frozenset(z)
    unknown = sorted(z - c2.full_scope())
    if unknown:
        raise InputError(f"marginalized variables not in circuit: {unknown}")
    kept = c2.full_scope() - z
    if set(y) != set(kept):
        raise InputError(f"evidence must cover exactly the kept variables {sorted(kept)}")
    outs: dict[int, np.ndarray] = {}
    for lid in topological_order(c2):
        layer = c2.layers[lid]
        if isinstance(layer, InputLayer):
            if layer.var in z:
                outs[lid] = layer.basis.integral_vector()
            else:
                try:
                    outs[lid] = layer.basis.eval(y[layer.var])
                except InputError as exc:
                    raise InputError(f"variable {layer.var}: {exc}") from exc
                if counter is not None:
                    # the self-conjugate Kronecker inside the squared basis
                    # performs one multiply per output entry
                    counter.add(lid, layer.basis.size)
        elif isinstance(layer, SumLayer):
            outs[lid] = layer.weights @ outs[layer.input]
            if counter is not None:
                counter.add(lid, layer.weights.size)
        elif isinstance(layer, HadamardLayer):
            a, b = (outs[i] for i in layer.inputs)
            outs[lid] = a * b
            if counter is not None:
                counter.add(lid, a.shape[0])
        else:
            a, b = (outs[i] for i in layer.inputs)
            block = np.kron(a, b)
            if isinstance(layer, PermutedKroneckerLayer):
                block = layer.perm.apply(block)
            outs[lid] = block
            if counter is not None:
                counter.add(lid, a.shape[0] * b.shape[0])
    return clamp_real(complex(outs[c2.root][0]), "integrated squared circuit")
