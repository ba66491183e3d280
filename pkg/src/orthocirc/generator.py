"""Seeded construction of random structured-decomposable circuits.

Circuits are built over a variable tree: one input layer per leaf, one
product layer per internal node, and a sum layer above every product, with
the root sum mapping to width 1.  Width-adapter sums are inserted above input
layers only when a Hadamard sibling forces a common width.  Unitary mode
draws Haar-distributed semi-unitary weights via QR of complex Gaussians, so
the resulting circuit is orthonormal; generic mode keeps the raw Gaussian
draw.  A fixed (vtree, spec) pair always produces a bit-identical circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .bases import Indicator
from .circuit import Circuit, HadamardLayer, InputLayer, KroneckerLayer, SumLayer
from .errors import InputError
from .linalg import qr_thin

SHAPES = ("random", "balanced", "chain")
PRODUCT_KINDS = ("hadamard", "kronecker", "mixed")
PARAM_MODES = ("unitary", "generic")


@dataclass(frozen=True)
class VTreeLeaf:
    var: int


@dataclass(frozen=True)
class VTreeNode:
    left: "VTree"
    right: "VTree"


VTree = Union[VTreeLeaf, VTreeNode]


def vtree_scope(node: VTree) -> frozenset[int]:
    if isinstance(node, VTreeLeaf):
        return frozenset((node.var,))
    return vtree_scope(node.left) | vtree_scope(node.right)


def vtree_depth(node: VTree) -> int:
    if isinstance(node, VTreeLeaf):
        return 0
    return 1 + max(vtree_depth(node.left), vtree_depth(node.right))


def random_vtree(variables: Sequence[int], shape: str, seed: int) -> VTree:
    """Variable tree over `variables`: a caterpillar chain, a minimal-depth
    balanced tree, or a seeded random binary split."""
    variables = list(variables)
    if not variables:
        raise InputError("vtree needs at least one variable")
    if shape not in SHAPES:
        raise InputError(f"unknown vtree shape {shape!r}; expected one of {SHAPES}")
    if shape == "chain":
        node: VTree = VTreeLeaf(variables[-1])
        for var in reversed(variables[:-1]):
            node = VTreeNode(VTreeLeaf(var), node)
        return node
    if shape == "balanced":

        def split(vs):
            if len(vs) == 1:
                return VTreeLeaf(vs[0])
            half = len(vs) // 2
            return VTreeNode(split(vs[:half]), split(vs[half:]))

        return split(variables)
    rng = np.random.default_rng(seed)
    order = [int(v) for v in rng.permutation(variables)]

    def rsplit(vs):
        if len(vs) == 1:
            return VTreeLeaf(vs[0])
        cut = int(rng.integers(1, len(vs)))
        return VTreeNode(rsplit(vs[:cut]), rsplit(vs[cut:]))

    return rsplit(order)


@dataclass(frozen=True)
class GenSpec:
    """Everything that determines a generated circuit; the seed fixes both
    the vtree (via :func:`generate_circuit`) and all parameter draws."""

    shape: str = "balanced"
    width: int = 2
    product_kind: str = "mixed"
    param_mode: str = "unitary"
    seed: int = 0
    domain_size: int = 2
    bases: tuple | None = None  # per-variable basis override, indexed by VariableId

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InputError(f"unknown vtree shape {self.shape!r}")
        if self.width < 1:
            raise InputError(f"width must be >= 1, got {self.width}")
        if self.domain_size < 1:
            raise InputError(f"domain size must be >= 1, got {self.domain_size}")
        if self.product_kind not in PRODUCT_KINDS:
            raise InputError(f"unknown product kind {self.product_kind!r}")
        if self.param_mode not in PARAM_MODES:
            raise InputError(f"unknown parameter mode {self.param_mode!r}")


def _draw_weights(rng: np.random.Generator, rows: int, cols: int, mode: str) -> np.ndarray:
    a = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    if mode == "generic":
        return a
    q, _ = qr_thin(a.conj().T)  # cols x rows with orthonormal columns
    return q.conj().T


def build_random_circuit(vtree: VTree, spec: GenSpec) -> Circuit:
    """Deterministically materialize a circuit over `vtree` per `spec`.

    The output always validates as structured-decomposable, and is
    orthonormal exactly when `spec.param_mode` is unitary.
    """
    rng = np.random.default_rng(spec.seed)
    variables = sorted(vtree_scope(vtree))
    if variables != list(range(len(variables))):
        raise InputError("vtree leaves must cover a dense variable range 0..d-1")

    def basis_for(var: int):
        if spec.bases is not None:
            return spec.bases[var]
        return Indicator(spec.domain_size)

    domains = tuple(basis_for(var).domain for var in variables)

    kinds: dict[int, str] = {}

    def assign_kinds(node: VTree) -> None:
        # Preorder draw so 'mixed' consumes the stream deterministically.
        if isinstance(node, VTreeLeaf):
            return
        if spec.product_kind == "mixed":
            kinds[id(node)] = "hadamard" if rng.integers(2) == 0 else "kronecker"
        else:
            kinds[id(node)] = spec.product_kind
        assign_kinds(node.left)
        assign_kinds(node.right)

    assign_kinds(vtree)

    natural: dict[int, int] = {}

    def nat(node: VTree) -> int:
        key = id(node)
        if key not in natural:
            if isinstance(node, VTreeLeaf):
                natural[key] = min(spec.width, basis_for(node.var).size)
            elif kinds[key] == "hadamard":
                natural[key] = min(spec.width, nat(node.left), nat(node.right))
            else:
                natural[key] = min(spec.width, nat(node.left) * nat(node.right))
        return natural[key]

    layers: dict[int, object] = {}

    def fresh(layer) -> int:
        lid = len(layers)
        layers[lid] = layer
        return lid

    def build(node: VTree, want: int | None, force_sum: bool = False) -> tuple[int, int]:
        """Returns (top layer id, output width); `want` forces the width."""
        if isinstance(node, VTreeLeaf):
            basis = basis_for(node.var)
            top = fresh(InputLayer(node.var, basis))
            target = want if want is not None else nat(node)
            if target != basis.size or force_sum:
                top = fresh(SumLayer(top, _draw_weights(rng, target, basis.size, spec.param_mode)))
            return top, target
        if kinds[id(node)] == "hadamard":
            t = min(nat(node.left), nat(node.right))
            left, _ = build(node.left, t)
            right, _ = build(node.right, t)
            pid = fresh(HadamardLayer((left, right)))
            pwidth = t
        else:
            left, lw = build(node.left, None)
            right, rw = build(node.right, None)
            pid = fresh(KroneckerLayer((left, right)))
            pwidth = lw * rw
        rows = want if want is not None else nat(node)
        sid = fresh(SumLayer(pid, _draw_weights(rng, rows, pwidth, spec.param_mode)))
        return sid, rows

    # The root always carries a sum, so even a single-leaf tree ends in a
    # width-1 sum layer as orthonormalization expects.
    root, _ = build(vtree, 1, force_sum=True)
    return Circuit(layers, root, domains)


def generate_circuit(num_vars: int, spec: GenSpec) -> Circuit:
    """Convenience wrapper: seeded vtree plus seeded parameters in one call."""
    vtree = random_vtree(range(num_vars), spec.shape, spec.seed)
    return build_random_circuit(vtree, spec)
