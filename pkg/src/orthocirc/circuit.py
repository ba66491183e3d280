"""Tensorized-circuit data model, structural validation, and evaluation.

A circuit is a DAG of vector-valued layers over variables 0..d-1.  Input
layers evaluate a basis over one variable, Hadamard and Kronecker layers
combine exactly two disjoint-scope inputs, and sum layers apply a complex
matrix to their single input.  The root outputs one scalar.  Circuits are
immutable after construction and safe to evaluate concurrently.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .bases import ORTHONORMAL_FAMILIES
from .domains import Domain, contains as domain_contains
from .errors import InputError, StructuralError
from .linalg import Permutation, is_semi_unitary

LayerId = int
VariableId = int


@dataclass(frozen=True, eq=False)
class InputLayer:
    """Basis evaluation over a single variable."""

    var: int
    basis: object  # one of the bases families, or a squared-basis wrapper


@dataclass(frozen=True, eq=False)
class SumLayer:
    """Matrix-vector product: out = weights @ input, weights in C^{K1 x K2}."""

    input: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.complex128)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise StructuralError(f"sum weights must be a non-empty matrix, got shape {w.shape}")
        # canonical layout keeps matmul rounding identical across circuits
        # that are equal entrywise (e.g. after a serialization round trip)
        object.__setattr__(self, "weights", np.ascontiguousarray(w))


@dataclass(frozen=True, eq=False)
class HadamardLayer:
    """Elementwise product of two equal-width inputs."""

    inputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True, eq=False)
class KroneckerLayer:
    """Tensor product of two inputs, row-major flattening."""

    inputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True, eq=False)
class PermutedKroneckerLayer:
    """Kronecker product followed by a fixed output permutation.

    Produced by circuit squaring, where the permutation regroups the
    self-conjugate factor pairs of the two squared inputs.
    """

    inputs: tuple[int, ...]
    perm: Permutation

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))


Layer = Union[InputLayer, SumLayer, HadamardLayer, KroneckerLayer, PermutedKroneckerLayer]
PRODUCT_LAYERS = (HadamardLayer, KroneckerLayer, PermutedKroneckerLayer)


def layer_inputs(layer: Layer) -> tuple[int, ...]:
    if isinstance(layer, InputLayer):
        return ()
    if isinstance(layer, SumLayer):
        return (layer.input,)
    return layer.inputs


@dataclass(frozen=True)
class ValidationReport:
    """Structural flags plus the list of (layer id, reason) violations.

    The orthonormal flag and the structured-decomposability flag are
    independent facts; neither implies the other.
    """

    decomposable: bool
    structured_decomposable: bool
    orthonormal: bool
    violations: tuple[tuple[int, str], ...] = field(default_factory=tuple)


class Circuit:
    """Immutable layer store with a single scalar-output root.

    Construction rejects cycles, dangling references, unreachable layers,
    non-binary products, width mismatches, basis/domain disagreements, and
    roots of width other than 1.
    """

    def __init__(self, layers: Mapping[int, Layer], root: int, domains: Sequence[Domain]):
        self.layers: dict[int, Layer] = dict(layers)
        self.root = int(root)
        self.domains: tuple[Domain, ...] = tuple(domains)
        if not self.domains:
            raise StructuralError("circuit needs at least one variable")
        if self.root not in self.layers:
            raise StructuralError(f"root {self.root} is not a layer id")
        for lid, layer in self.layers.items():
            for ref in layer_inputs(layer):
                if ref not in self.layers:
                    raise StructuralError(f"layer {lid} references missing layer {ref}")
        self._topo = self._topological_order()
        self._check_reachable()
        self.widths: dict[int, int] = {}
        self.scopes: dict[int, frozenset[int]] = {}
        self._compute_widths_scopes()
        self._check_structure()

    # -- derived structure ------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.domains)

    def width(self, lid: int) -> int:
        return self.widths[lid]

    def scope(self, lid: int) -> frozenset[int]:
        return self.scopes[lid]

    def full_scope(self) -> frozenset[int]:
        return frozenset(range(self.num_vars))

    def _topological_order(self) -> tuple[int, ...]:
        remaining = {lid: len(layer_inputs(layer)) for lid, layer in self.layers.items()}
        consumers: dict[int, list[int]] = {lid: [] for lid in self.layers}
        for lid, layer in self.layers.items():
            for ref in layer_inputs(layer):
                consumers[ref].append(lid)
        ready = [lid for lid, deg in remaining.items() if deg == 0]
        heapq.heapify(ready)
        order: list[int] = []
        while ready:
            lid = heapq.heappop(ready)
            order.append(lid)
            for consumer in consumers[lid]:
                remaining[consumer] -= 1
                if remaining[consumer] == 0:
                    heapq.heappush(ready, consumer)
        if len(order) != len(self.layers):
            raise StructuralError("cycle detected in circuit graph")
        return tuple(order)

    def _check_reachable(self) -> None:
        seen = {self.root}
        stack = [self.root]
        while stack:
            for ref in layer_inputs(self.layers[stack.pop()]):
                if ref not in seen:
                    seen.add(ref)
                    stack.append(ref)
        unreachable = sorted(set(self.layers) - seen)
        if unreachable:
            raise StructuralError(f"layers unreachable from root: {unreachable}")

    def _compute_widths_scopes(self) -> None:
        for lid in self._topo:
            layer = self.layers[lid]
            if isinstance(layer, InputLayer):
                self.widths[lid] = layer.basis.size
                self.scopes[lid] = frozenset((layer.var,))
            elif isinstance(layer, SumLayer):
                self.widths[lid] = layer.weights.shape[0]
                self.scopes[lid] = self.scopes[layer.input]
            elif isinstance(layer, HadamardLayer):
                self.widths[lid] = self.widths[layer.inputs[0]]
                self.scopes[lid] = frozenset().union(*(self.scopes[i] for i in layer.inputs))
            else:  # Kronecker or permuted Kronecker
                w = 1
                for i in layer.inputs:
                    w *= self.widths[i]
                self.widths[lid] = w
                self.scopes[lid] = frozenset().union(*(self.scopes[i] for i in layer.inputs))

    def _check_structure(self) -> None:
        for lid, layer in self.layers.items():
            if isinstance(layer, InputLayer):
                if not 0 <= layer.var < self.num_vars:
                    raise StructuralError(f"input layer {lid} references unknown variable {layer.var}")
                if layer.basis.domain != self.domains[layer.var]:
                    raise StructuralError(
                        f"input layer {lid}: basis domain {layer.basis.domain} does not match "
                        f"variable {layer.var} domain {self.domains[layer.var]}"
                    )
            elif isinstance(layer, SumLayer):
                if layer.weights.shape[1] != self.widths[layer.input]:
                    raise StructuralError(
                        f"sum layer {lid}: weights have {layer.weights.shape[1]} columns but "
                        f"input width is {self.widths[layer.input]}"
                    )
            elif isinstance(layer, PRODUCT_LAYERS):
                if len(layer.inputs) != 2:
                    raise StructuralError(
                        f"product layer {lid} has {len(layer.inputs)} inputs; exactly 2 are supported"
                    )
                if isinstance(layer, HadamardLayer):
                    w1, w2 = (self.widths[i] for i in layer.inputs)
                    if w1 != w2:
                        raise StructuralError(f"hadamard layer {lid} mixes widths {w1} and {w2}")
                if isinstance(layer, PermutedKroneckerLayer) and layer.perm.size != self.widths[lid]:
                    raise StructuralError(
                        f"layer {lid}: permutation size {layer.perm.size} "
                        f"does not match output width {self.widths[lid]}"
                    )
        if self.widths[self.root] != 1:
            raise StructuralError(f"root must have width 1, got {self.widths[self.root]}")
        covered = frozenset().union(*(self.scopes[lid] for lid in self.layers))
        missing = sorted(self.full_scope() - covered)
        if missing:
            raise StructuralError(f"variables not in any input layer scope: {missing}")


def topological_order(circuit: Circuit) -> tuple[int, ...]:
    """Layer ids with every layer after all its inputs; ties break by id."""
    return circuit._topo


def layer_size(circuit: Circuit, lid: int) -> int:
    """Number of scalar inputs feeding the scalar functions of one layer."""
    layer = circuit.layers[lid]
    if isinstance(layer, InputLayer):
        return circuit.width(lid)
    if isinstance(layer, SumLayer):
        return layer.weights.shape[0] * layer.weights.shape[1]
    n = len(layer.inputs)
    if isinstance(layer, HadamardLayer):
        return n * circuit.width(lid)
    prod = 1
    for i in layer.inputs:
        prod *= circuit.width(i)
    return n * prod


def max_layer_size(circuit: Circuit) -> int:
    return max(layer_size(circuit, lid) for lid in circuit.layers)


def validate(circuit: Circuit, unitary_tol: float = 1e-10) -> ValidationReport:
    """Check decomposability, structured decomposability, and orthonormality.

    Decomposability holds when every product layer's input scopes are pairwise
    disjoint.  Structured decomposability additionally requires product layers
    with identical scope to split it into identical child-scope multisets.
    Orthonormality requires every input basis to come from the orthonormal
    families and every sum weight matrix to be semi-unitary within
    `unitary_tol` in max norm.  Smoothness needs no check: sum layers have a
    single input.
    """
    violations: list[tuple[int, str]] = []
    decomposable = True
    partitions: dict[frozenset[int], tuple] = {}
    structured = True
    orthonormal = True
    for lid in topological_order(circuit):
        layer = circuit.layers[lid]
        if isinstance(layer, PRODUCT_LAYERS):
            s1, s2 = (circuit.scope(i) for i in layer.inputs)
            if s1 & s2:
                decomposable = False
                violations.append((lid, f"product inputs share variables {sorted(s1 & s2)}"))
                continue  # an overlapping product is no factorization to compare
            key = circuit.scope(lid)
            parts = tuple(sorted(tuple(sorted(circuit.scope(i))) for i in layer.inputs))
            if key in partitions:
                if partitions[key] != parts:
                    structured = False
                    violations.append(
                        (lid, f"scope {sorted(key)} split differently from an earlier product layer")
                    )
            else:
                partitions[key] = parts
        elif isinstance(layer, InputLayer):
            if not isinstance(layer.basis, ORTHONORMAL_FAMILIES):
                orthonormal = False
                violations.append((lid, f"basis {type(layer.basis).__name__} is not an orthonormal family"))
        elif isinstance(layer, SumLayer):
            k1, k2 = layer.weights.shape
            if k1 > k2:
                orthonormal = False
                violations.append((lid, f"sum weights are {k1}x{k2}; K1 > K2 is not orthonormal-eligible"))
            elif not is_semi_unitary(layer.weights, unitary_tol):
                orthonormal = False
                violations.append((lid, "sum weights are not semi-unitary"))
    structured = structured and decomposable
    return ValidationReport(decomposable, structured, orthonormal, tuple(violations))


def _check_assignment(circuit: Circuit, assignment: Mapping[int, object]) -> None:
    missing = sorted(circuit.full_scope() - set(assignment))
    if missing:
        raise InputError(f"assignment missing variables {missing}")
    unknown = sorted(set(assignment) - circuit.full_scope())
    if unknown:
        raise InputError(f"assignment has unknown variables {unknown}")
    for var, value in assignment.items():
        if not domain_contains(circuit.domains[var], value):
            raise InputError(f"variable {var}: value {value!r} outside domain {circuit.domains[var]}")


def feed_forward_batch(
    circuit: Circuit,
    columns: Mapping[int, np.ndarray],
    counter=None,
) -> dict[int, np.ndarray]:
    """Evaluate every layer on a batch of assignments.

    `columns` maps each variable to a length-n vector of values; the result
    maps each layer id to its (width, n) complex output block.  The optional
    counter receives one multiply-accumulate per complex scalar product.
    """
    if set(columns) != set(circuit.full_scope()):
        raise InputError("batch columns must cover exactly the circuit variables")
    cols = {var: np.asarray(vals) for var, vals in columns.items()}
    lengths = {c.shape[0] for c in cols.values()}
    if len(lengths) != 1:
        raise InputError("batch columns must share one length")
    n = lengths.pop()
    outs: dict[int, np.ndarray] = {}
    for lid in topological_order(circuit):
        layer = circuit.layers[lid]
        if isinstance(layer, InputLayer):
            try:
                outs[lid] = layer.basis.eval_batch(cols[layer.var])
            except InputError as exc:
                raise InputError(f"variable {layer.var}: {exc}") from exc
        elif isinstance(layer, SumLayer):
            outs[lid] = layer.weights @ outs[layer.input]
            if counter is not None:
                counter.add(lid, layer.weights.size * n)
        elif isinstance(layer, HadamardLayer):
            a, b = (outs[i] for i in layer.inputs)
            outs[lid] = a * b
            if counter is not None:
                counter.add(lid, a.shape[0] * n)
        else:
            a, b = (outs[i] for i in layer.inputs)
            block = np.einsum("ik,jk->ijk", a, b).reshape(a.shape[0] * b.shape[0], n)
            if isinstance(layer, PermutedKroneckerLayer):
                block = layer.perm.apply(block)
            outs[lid] = block
            if counter is not None:
                counter.add(lid, a.shape[0] * b.shape[0] * n)
    return outs


def feed_forward(circuit: Circuit, assignment: Mapping[int, object], counter=None) -> dict[int, np.ndarray]:
    """Per-layer output vectors for a single assignment."""
    _check_assignment(circuit, assignment)
    columns = {var: np.asarray([assignment[var]]) for var in circuit.full_scope()}
    outs = feed_forward_batch(circuit, columns, counter=counter)
    return {lid: block[:, 0] for lid, block in outs.items()}


def evaluate(circuit: Circuit, assignment: Mapping[int, object]) -> complex:
    """Root scalar value at one assignment."""
    return complex(feed_forward(circuit, assignment)[circuit.root][0])
