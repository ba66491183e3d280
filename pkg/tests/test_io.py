import json

import numpy as np
import pytest

from orthocirc import (
    DanglingReferenceError,
    GenSpec,
    ParseError,
    VersionError,
    brute_force_z,
    evaluate,
    generate_circuit,
    orthonormalize,
    read_circuit,
    square_circuit,
    validate,
    write_circuit,
)
from _builders import GOLDEN_DIR, finite_assignments, minimal_circuit


def test_minimal_golden_round_trip_is_byte_stable():
    text = (GOLDEN_DIR / "minimal.json").read_text()
    assert write_circuit(read_circuit(text)) == text


def test_minimal_golden_evaluates_to_inv_sqrt2():
    c = read_circuit((GOLDEN_DIR / "minimal.json").read_text())
    assert abs(evaluate(c, {0: 0}) - 0.7071067811865476) <= 1e-16


def test_tree_golden_validates_and_normalizes():
    text = (GOLDEN_DIR / "pair_tree.json").read_text()
    c = read_circuit(text)
    report = validate(c)
    assert report.structured_decomposable and report.orthonormal
    assert abs(brute_force_z(c) - 1.0) <= 1e-12
    assert write_circuit(c) == text


def test_write_matches_minimal_golden_bytes():
    assert write_circuit(minimal_circuit()) == (GOLDEN_DIR / "minimal.json").read_text()


def test_round_trip_evaluates_identically_zero_ulp():
    c = generate_circuit(4, GenSpec(shape="balanced", width=2, product_kind="mixed", seed=42))
    back = read_circuit(write_circuit(c))
    for assignment in finite_assignments(c):
        assert evaluate(c, assignment) == evaluate(back, assignment)


def test_write_read_write_fixed_point():
    c = generate_circuit(5, GenSpec(shape="random", width=3, product_kind="mixed", seed=8, domain_size=3))
    text = write_circuit(c)
    assert write_circuit(read_circuit(text)) == text


def test_orthonormalize_output_survives_round_trip():
    c = generate_circuit(4, GenSpec(shape="random", width=2, param_mode="generic", seed=11))
    result = orthonormalize(c)
    back = read_circuit(write_circuit(result.circuit))
    assert validate(back).orthonormal


def test_squared_circuit_exports_permutation_as_sum():
    c = generate_circuit(2, GenSpec(shape="balanced", width=2, product_kind="kronecker", seed=3))
    sq = square_circuit(c)
    text = write_circuit(sq.circuit)
    doc = json.loads(text)
    kinds = [rec["kind"] for rec in doc["layers"]]
    assert "kronecker" in kinds  # the fused layer splits into kronecker + sum
    back = read_circuit(text)
    for assignment in finite_assignments(c):
        want = evaluate(sq.circuit, assignment)
        assert abs(evaluate(back, assignment) - want) <= 1e-14
    assert write_circuit(back) == text


def test_continuous_domains_round_trip():
    from orthocirc import Fourier, Hermite, Legendre

    c = generate_circuit(3, GenSpec(shape="chain", width=2, seed=5, bases=(Hermite(2), Fourier(2), Legendre(2))))
    back = read_circuit(write_circuit(c))
    assert back.domains == c.domains
    assignment = {0: 0.3, 1: 0.25, 2: -0.5}
    assert evaluate(back, assignment) == evaluate(c, assignment)


class TestReadErrors:
    def doc(self):
        return json.loads((GOLDEN_DIR / "minimal.json").read_text())

    def test_not_json(self):
        with pytest.raises(ParseError, match="JSON"):
            read_circuit("[{]")

    def test_version_mismatch(self):
        doc = self.doc()
        doc["format_version"] = "2"
        with pytest.raises(VersionError):
            read_circuit(json.dumps(doc))

    def test_dangling_root(self):
        doc = self.doc()
        doc["root"] = 99
        with pytest.raises(DanglingReferenceError, match="99"):
            read_circuit(json.dumps(doc))

    def test_dangling_sum_input(self):
        doc = self.doc()
        doc["layers"][1]["input"] = 42
        with pytest.raises(DanglingReferenceError, match="42"):
            read_circuit(json.dumps(doc))

    def test_unknown_layer_kind(self):
        doc = self.doc()
        doc["layers"][0]["kind"] = "max"
        with pytest.raises(ParseError, match=r"\$\.layers\[0\]"):
            read_circuit(json.dumps(doc))

    def test_unknown_basis(self):
        doc = self.doc()
        doc["layers"][0]["basis"]["name"] = "wavelet"
        with pytest.raises(ParseError, match="wavelet"):
            read_circuit(json.dumps(doc))

    def test_weight_count_mismatch(self):
        doc = self.doc()
        doc["layers"][1]["weights"] = [[1.0, 0.0]]
        with pytest.raises(ParseError, match="weights"):
            read_circuit(json.dumps(doc))

    def test_missing_key_reports_path(self):
        doc = self.doc()
        del doc["layers"][1]["rows"]
        with pytest.raises(ParseError, match=r"\$\.layers\[1\]"):
            read_circuit(json.dumps(doc))

    def test_duplicate_layer_id(self):
        doc = self.doc()
        doc["layers"][1]["id"] = 0
        with pytest.raises(ParseError, match="duplicate"):
            read_circuit(json.dumps(doc))

    def test_sparse_variable_ids(self):
        doc = self.doc()
        doc["variables"][0]["id"] = 3
        with pytest.raises(ParseError, match="dense"):
            read_circuit(json.dumps(doc))


def test_shortest_round_trip_decimals_preserve_binary64():
    rng = np.random.default_rng(0)
    values = rng.standard_normal(50) * 10.0 ** rng.integers(-8, 8, size=50)
    for v in values:
        assert float(json.loads(json.dumps(float(v)))) == float(v)
