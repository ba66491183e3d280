"""Orthonormalization transform: rewrite a structured-decomposable circuit
with orthonormal input bases into an orthonormal circuit c' with
c'(x) = beta * c(x), beta = Z^(-1/2).

Each sum layer's effective matrix V = W @ R is factorized through a thin QR
of its conjugate transpose; the semi-unitary part stays in the layer and the
triangular remainder is pushed towards the root, where it collapses to the
scalar 1/beta.  Hadamard layers turn into Kronecker layers because pushing a
triangular factor through an elementwise product requires the face-splitting
product of the two remainders.
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
    PermutedKroneckerLayer,
    SumLayer,
    topological_order,
    validate,
)
from .errors import PreconditionError, ShapeError
from .linalg import face_split, kron, qr_thin

# Tally of scalar operations stays below OP_BOUND_CONSTANT * (L_sum * J^3 +
# L_prod * J^4) with J the max layer output width of the input circuit.
OP_BOUND_CONSTANT = 8


@dataclass(frozen=True)
class OrthonormalizeResult:
    """The orthonormal circuit, the scalar beta = Z^(-1/2) relating it to the
    original, a provenance map from new layer ids to source ids, and the
    scalar-operation tally of the transform."""

    circuit: Circuit
    beta: float
    origin: Mapping[int, int]
    op_count: int


def _check_preconditions(c: Circuit) -> None:
    for lid, layer in c.layers.items():
        if isinstance(layer, PermutedKroneckerLayer):
            raise PreconditionError(f"layer {lid}: cannot orthonormalize a squared circuit")
        if isinstance(layer, InputLayer) and not isinstance(layer.basis, ORTHONORMAL_FAMILIES):
            raise PreconditionError(
                f"layer {lid}: basis {type(layer.basis).__name__} is not an orthonormal family"
            )
    root = c.layers[c.root]
    if not isinstance(root, SumLayer) or root.weights.shape[0] != 1:
        raise PreconditionError("root must be a sum layer of output width 1")
    if not validate(c).structured_decomposable:
        raise PreconditionError("circuit must be structured-decomposable")


def orthonormalize(c: Circuit) -> OrthonormalizeResult:
    """Transform c into an orthonormal circuit computing beta * c(x).

    The output circuit has every sum semi-unitary and every Hadamard layer of
    c replaced by a Kronecker layer; its square is an already-normalized
    distribution.  Uniqueness holds only up to the QR phase convention, so
    compare function values, never raw parameters.

    Raises:
        PreconditionError: root is not a width-1 sum, a basis is not
            orthonormal, or the circuit is not structured-decomposable.
        ShapeError: some sum's effective matrix has more rows than columns,
            which the factorization cannot absorb.
        SingularityError: the pushed matrix is rank-deficient, meaning the
            squared function is degenerate along some direction.
    """
    _check_preconditions(c)
    new_layers: dict[int, object] = {}
    origin: dict[int, int] = {}
    # memo: source layer id -> (new layer id, pushed matrix R with
    # c_layer(x) = R @ new_layer(x)); shared sub-circuits transform once.
    memo: dict[int, tuple[int, np.ndarray]] = {}
    ops = 0

    def fresh(layer, src: int) -> int:
        lid = len(new_layers)
        new_layers[lid] = layer
        origin[lid] = src
        return lid

    for lid in topological_order(c):
        layer = c.layers[lid]
        if isinstance(layer, InputLayer):
            new_id = fresh(InputLayer(layer.var, layer.basis), lid)
            memo[lid] = (new_id, np.eye(layer.basis.size, dtype=np.complex128))
        elif isinstance(layer, SumLayer):
            child_id, r1 = memo[layer.input]
            v = layer.weights @ r1
            ops += layer.weights.shape[0] * r1.shape[0] * r1.shape[1]
            k1, k3 = v.shape
            if k1 > k3:
                raise ShapeError(
                    f"sum layer {lid}: effective matrix is {k1}x{k3}; "
                    "K1 <= K3 is required to orthonormalize"
                )
            q, r = qr_thin(v.conj().T)
            ops += 2 * k3 * k1 * k1
            new_id = fresh(SumLayer(child_id, q.conj().T), lid)
            memo[lid] = (new_id, r.conj().T)
        elif isinstance(layer, HadamardLayer):
            (a_id, r1), (b_id, r2) = (memo[i] for i in layer.inputs)
            new_id = fresh(KroneckerLayer((a_id, b_id)), lid)
            memo[lid] = (new_id, face_split(r1, r2))
            ops += r1.shape[0] * r1.shape[1] * r2.shape[1]
        else:  # Kronecker
            (a_id, r1), (b_id, r2) = (memo[i] for i in layer.inputs)
            new_id = fresh(KroneckerLayer((a_id, b_id)), lid)
            memo[lid] = (new_id, kron(r1, r2))
            ops += r1.size * r2.size

    root_id, r_root = memo[c.root]
    scale = float(r_root[0, 0].real)  # 1x1 real positive by the QR convention
    circuit = Circuit(new_layers, root_id, c.domains)
    return OrthonormalizeResult(circuit=circuit, beta=1.0 / scale, origin=origin, op_count=ops)


def partition_function_via_orthonormalize(c: Circuit) -> float:
    """Partition function of the squared circuit, recovered as beta^(-2)."""
    beta = orthonormalize(c).beta
    return 1.0 / (beta * beta)
