"""Hand-built circuits and small helpers shared across the test modules."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from orthocirc import (
    Circuit,
    Finite,
    HadamardLayer,
    Indicator,
    InputLayer,
    SumLayer,
)

GOLDEN_DIR = Path(__file__).parent / "golden"

INV_SQRT2 = 2**-0.5


def rel_close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def minimal_circuit() -> Circuit:
    """Indicator(2) feeding a 1x2 sum of [1/sqrt2, 1/sqrt2]."""
    return Circuit(
        {
            0: InputLayer(0, Indicator(2)),
            1: SumLayer(0, np.array([[INV_SQRT2, INV_SQRT2]])),
        },
        1,
        (Finite(2),),
    )


def w20_circuit() -> Circuit:
    """Indicator(2) feeding the 1x2 sum [2, 0]; its squared mass is 4."""
    return Circuit(
        {
            0: InputLayer(0, Indicator(2)),
            1: SumLayer(0, np.array([[2.0, 0.0]])),
        },
        1,
        (Finite(2),),
    )


def pair_tree_circuit(weights: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None) -> Circuit:
    """Four binary variables in a balanced tree of Hadamard products.

    Layer ids: inputs 0-3, pair products 4 and 5, pair sums 6 and 7, top
    product 8, root sum 9.  Default weights are unitary, so the circuit is
    orthonormal.
    """
    if weights is None:
        h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        weights = (np.array([[INV_SQRT2, 1j * INV_SQRT2]]), h, h.copy())
    w_root, w_left, w_right = weights
    layers = {
        0: InputLayer(0, Indicator(2)),
        1: InputLayer(1, Indicator(2)),
        2: InputLayer(2, Indicator(2)),
        3: InputLayer(3, Indicator(2)),
        4: HadamardLayer((0, 1)),
        5: HadamardLayer((2, 3)),
        6: SumLayer(4, w_left),
        7: SumLayer(5, w_right),
        8: HadamardLayer((6, 7)),
        9: SumLayer(8, w_root),
    }
    return Circuit(layers, 9, tuple(Finite(2) for _ in range(4)))


def random_pair_tree_circuit(seed: int) -> Circuit:
    """Pair-tree shape with generic complex Gaussian parameters."""
    rng = np.random.default_rng(seed)

    def draw(rows, cols):
        return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)

    return pair_tree_circuit((draw(1, 2), draw(2, 2), draw(2, 2)))


def finite_assignments(circuit: Circuit):
    """All joint assignments of a circuit over finite domains."""
    sizes = [dom.size for dom in circuit.domains]
    for vals in itertools.product(*(range(s) for s in sizes)):
        yield dict(enumerate(vals))
