import numpy as np
import pytest

from orthocirc import (
    Circuit,
    Finite,
    GenSpec,
    HadamardLayer,
    Indicator,
    InputError,
    InputLayer,
    NumericalError,
    PreconditionError,
    SumLayer,
    evaluate,
    evaluate_squared_integrated,
    generate_circuit,
    layer_size,
    square_circuit,
)
from orthocirc.squaring import clamp_real
from _builders import pair_tree_circuit, finite_assignments, random_pair_tree_circuit


def test_unimodular_sum_halves():
    c = Circuit(
        {
            0: InputLayer(0, Indicator(2)),
            1: SumLayer(0, np.array([[2**-0.5, 1j * 2**-0.5]])),
        },
        1,
        (Finite(2),),
    )
    sq = square_circuit(c)
    assert abs(evaluate(sq.circuit, {0: 0}) - 0.5) < 1e-15
    assert abs(evaluate(sq.circuit, {0: 1}) - 0.5) < 1e-15


def test_sum_weights_become_self_conjugate_kron():
    c = pair_tree_circuit()
    sq = square_circuit(c)
    for lid, layer in c.layers.items():
        if isinstance(layer, SumLayer):
            squared = sq.circuit.layers[sq.origin[lid]]
            expected = np.kron(layer.weights, layer.weights.conj())
            assert np.array_equal(squared.weights, expected)


def test_structure_mirrors_source():
    spec = GenSpec(shape="balanced", width=2, product_kind="kronecker", param_mode="unitary", seed=4)
    c = generate_circuit(4, spec)
    sq = square_circuit(c)
    assert set(sq.origin.values()) == set(c.layers)
    for lid in c.layers:
        assert sq.circuit.width(lid) == c.width(lid) ** 2
    kinds = [type(l).__name__ for l in sq.circuit.layers.values()]
    assert "PermutedKroneckerLayer" in kinds


@pytest.mark.parametrize("seed", range(8))
def test_pointwise_squaring_identity(seed):
    kind = ("hadamard", "kronecker", "mixed")[seed % 3]
    mode = ("unitary", "generic")[seed % 2]
    shape = ("balanced", "random", "chain")[seed % 3]
    spec = GenSpec(shape=shape, width=2, product_kind=kind, param_mode=mode, seed=seed)
    c = generate_circuit(4, spec)
    sq = square_circuit(c)
    for assignment in finite_assignments(c):
        want = abs(evaluate(c, assignment)) ** 2
        got = evaluate(sq.circuit, assignment)
        assert abs(got.imag) <= 1e-12 * max(1.0, want)
        assert abs(got.real - want) <= 1e-10 * max(1.0, want)


def test_sum_layer_size_squares_exactly():
    c = random_pair_tree_circuit(seed=5)
    sq = square_circuit(c)
    for lid, layer in c.layers.items():
        if isinstance(layer, SumLayer):
            assert layer_size(sq.circuit, sq.origin[lid]) == layer_size(c, lid) ** 2


def test_requires_structured_decomposability():
    layers = {
        0: InputLayer(0, Indicator(2)),
        1: InputLayer(0, Indicator(2)),
        2: HadamardLayer((0, 1)),  # overlapping scopes
        3: SumLayer(2, np.ones((1, 2))),
    }
    c = Circuit(layers, 3, (Finite(2),))
    with pytest.raises(PreconditionError, match="structured-decomposable"):
        square_circuit(c)


def test_double_squaring_rejected():
    sq = square_circuit(pair_tree_circuit())
    with pytest.raises(PreconditionError):
        square_circuit(sq.circuit)


class TestIntegratedEvaluation:
    def test_full_marginal_of_orthonormal_is_one(self):
        sq = square_circuit(pair_tree_circuit())
        z = frozenset(range(4))
        assert abs(evaluate_squared_integrated(sq, {}, z) - 1.0) <= 1e-12

    def test_empty_marginal_is_squared_modulus(self):
        c = random_pair_tree_circuit(seed=9)
        sq = square_circuit(c)
        y = {0: 1, 1: 0, 2: 1, 3: 0}
        want = abs(evaluate(c, y)) ** 2
        assert abs(evaluate_squared_integrated(sq, y, frozenset()) - want) <= 1e-12 * max(1.0, want)

    def test_partial_marginal_matches_explicit_sum(self):
        c = generate_circuit(4, GenSpec(shape="balanced", width=2, product_kind="mixed", seed=21))
        sq = square_circuit(c)
        y = {0: 0, 1: 1}
        z = frozenset({2, 3})
        explicit = sum(
            abs(evaluate(c, {**y, 2: a, 3: b})) ** 2 for a in range(2) for b in range(2)
        )
        got = evaluate_squared_integrated(sq, y, z)
        assert abs(got - explicit) <= 1e-10 * max(1.0, explicit)

    def test_result_is_non_negative_real(self):
        c = random_pair_tree_circuit(seed=2)
        sq = square_circuit(c)
        value = evaluate_squared_integrated(sq, {0: 0, 1: 1}, frozenset({2, 3}))
        assert isinstance(value, float)
        assert value >= 0.0

    def test_evidence_must_cover_kept_variables(self):
        sq = square_circuit(pair_tree_circuit())
        with pytest.raises(InputError):
            evaluate_squared_integrated(sq, {0: 0}, frozenset({2, 3}))
        with pytest.raises(InputError):
            evaluate_squared_integrated(sq, {0: 0, 1: 0, 2: 0}, frozenset({2, 3}))


class TestClampReal:
    def test_passes_clean_values(self):
        assert clamp_real(0.25 + 1e-14j) == pytest.approx(0.25)

    def test_clamps_tiny_negative(self):
        assert clamp_real(complex(-1e-13, 0.0)) == 0.0

    def test_rejects_large_imaginary_residue(self):
        with pytest.raises(NumericalError):
            clamp_real(1.0 + 0.01j)

    def test_rejects_substantial_negative(self):
        with pytest.raises(NumericalError):
            clamp_real(complex(-0.5, 0.0))
