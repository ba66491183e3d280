"""Textual circuit serialization for CLI interchange and golden-file tests.

The format is JSON with a fixed key order: format_version, variables (id plus
domain descriptor), layers, root.  Complex weights are row-major lists of
[re, im] decimal pairs, rendered as shortest round-trip decimals so binary64
values survive a round trip exactly.  Writing is canonical: layers are
renumbered in topological order (ties by original id) and fused Kronecker
permutations are exported as explicit permutation-parameterized sum layers.
"""

from __future__ import annotations

import json

import numpy as np

from . import bases
from .circuit import (
    Circuit,
    HadamardLayer,
    InputLayer,
    KroneckerLayer,
    PermutedKroneckerLayer,
    SumLayer,
    topological_order,
)
from .domains import Finite, Interval, RealLine, UnitPeriodic
from .errors import DanglingReferenceError, ParseError, VersionError
from .squaring import SquaredBasis

FORMAT_VERSION = "1"

_BASIS_NAMES = {
    bases.Indicator: "indicator",
    bases.Fourier: "fourier",
    bases.Hermite: "hermite",
    bases.Legendre: "legendre",
}
_BASIS_BY_NAME = {name: cls for cls, name in _BASIS_NAMES.items()}


def _domain_doc(domain) -> dict:
    if isinstance(domain, Finite):
        return {"kind": "finite", "size": domain.size}
    if isinstance(domain, RealLine):
        return {"kind": "real_line"}
    if isinstance(domain, Interval):
        return {"kind": "interval", "lo": domain.lo, "hi": domain.hi}
    if isinstance(domain, UnitPeriodic):
        return {"kind": "unit_periodic"}
    raise ParseError(f"unserializable domain {domain!r}")


def _domain_from_doc(doc, path: str):
    kind = _expect(doc, "kind", str, path)
    if kind == "finite":
        return Finite(_expect(doc, "size", int, path))
    if kind == "real_line":
        return RealLine()
    if kind == "interval":
        return Interval(float(_expect(doc, "lo", (int, float), path)),
                        float(_expect(doc, "hi", (int, float), path)))
    if kind == "unit_periodic":
        return UnitPeriodic()
    raise ParseError(f"{path}.kind: unknown domain kind {kind!r}")


def _basis_doc(basis) -> dict:
    if isinstance(basis, SquaredBasis):
        return {"name": "squared", "base": _basis_doc(basis.base)}
    name = _BASIS_NAMES.get(type(basis))
    if name is None:
        raise ParseError(f"unserializable basis {basis!r}")
    return {"name": name, "size": basis.size}


def _basis_from_doc(doc, path: str):
    name = _expect(doc, "name", str, path)
    if name == "squared":
        base = doc.get("base")
        if not isinstance(base, dict):
            raise ParseError(f"{path}.base: squared basis needs a base descriptor")
        return SquaredBasis(_basis_from_doc(base, path + ".base"))
    cls = _BASIS_BY_NAME.get(name)
    if cls is None:
        raise ParseError(f"{path}.name: unknown basis {name!r}")
    return cls(_expect(doc, "size", int, path))


def _expect(doc, key, types, path: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{path}: missing key {key!r}")
    value = doc[key]
    if types is int and isinstance(value, bool):
        raise ParseError(f"{path}.{key}: expected integer, got bool")
    if not isinstance(value, types):
        raise ParseError(f"{path}.{key}: expected {types}, got {type(value).__name__}")
    return value


def _pairs_to_matrix(pairs, rows: int, cols: int, path: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != rows * cols:
        raise ParseError(f"{path}: weights must list {rows * cols} [re, im] pairs")
    flat = np.empty(rows * cols, dtype=np.complex128)
    for idx, pair in enumerate(pairs):
        if not isinstance(pair, list) or len(pair) != 2 or any(isinstance(p, bool) for p in pair) \
                or not all(isinstance(p, (int, float)) for p in pair):
            raise ParseError(f"{path}[{idx}]: expected a [re, im] pair")
        flat[idx] = complex(pair[0], pair[1])
    return flat.reshape(rows, cols)


def _matrix_to_pairs(w: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in w.ravel()]


def write_circuit(circuit: Circuit) -> str:
    """Canonical text form of a circuit.

    Layers appear in topological order with ids renumbered 0..n-1; fused
    Kronecker permutations become an explicit kronecker layer followed by a
    permutation-matrix sum layer, so the document stays inside the plain
    four-kind schema.
    """
    records = []
    new_id: dict[int, int] = {}
    counter = 0

    def alloc() -> int:
        nonlocal counter
        counter += 1
        return counter - 1

    for lid in topological_order(circuit):
        layer = circuit.layers[lid]
        if isinstance(layer, InputLayer):
            new_id[lid] = alloc()
            records.append(
                {
                    "id": new_id[lid],
                    "kind": "input",
                    "var": int(layer.var),
                    "basis": _basis_doc(layer.basis),
                    "width": circuit.width(lid),
                }
            )
        elif isinstance(layer, SumLayer):
            new_id[lid] = alloc()
            rows, cols = layer.weights.shape
            records.append(
                {
                    "id": new_id[lid],
                    "kind": "sum",
                    "input": new_id[layer.input],
                    "rows": rows,
                    "cols": cols,
                    "weights": _matrix_to_pairs(layer.weights),
                }
            )
        elif isinstance(layer, PermutedKroneckerLayer):
            kron_id = alloc()
            records.append(
                {
                    "id": kron_id,
                    "kind": "kronecker",
                    "inputs": [new_id[i] for i in layer.inputs],
                }
            )
            new_id[lid] = alloc()
            n = layer.perm.size
            records.append(
                {
                    "id": new_id[lid],
                    "kind": "sum",
                    "input": kron_id,
                    "rows": n,
                    "cols": n,
                    "weights": _matrix_to_pairs(layer.perm.matrix()),
                }
            )
        else:
            new_id[lid] = alloc()
            records.append(
                {
                    "id": new_id[lid],
                    "kind": "hadamard" if isinstance(layer, HadamardLayer) else "kronecker",
                    "inputs": [new_id[i] for i in layer.inputs],
                }
            )
    doc = {
        "format_version": FORMAT_VERSION,
        "variables": [
            {"id": var, "domain": _domain_doc(dom)} for var, dom in enumerate(circuit.domains)
        ],
        "layers": records,
        "root": new_id[circuit.root],
    }
    return json.dumps(doc, indent=2) + "\n"


def read_circuit(text: str) -> Circuit:
    """Parse the canonical JSON schema into a Circuit.

    Raises ParseError (with the offending path) on schema violations,
    DanglingReferenceError on unknown layer references, and VersionError on
    an unsupported format_version.  Structural problems beyond references
    surface as StructuralError from the Circuit constructor.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    version = _expect(doc, "format_version", str, "$")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version!r}; this reader handles {FORMAT_VERSION!r}")

    var_docs = _expect(doc, "variables", list, "$")
    domains_by_id = {}
    for i, vd in enumerate(var_docs):
        path = f"$.variables[{i}]"
        vid = _expect(vd, "id", int, path)
        if vid in domains_by_id:
            raise ParseError(f"{path}: duplicate variable id {vid}")
        domains_by_id[vid] = _domain_from_doc(_expect(vd, "domain", dict, path), path + ".domain")
    if sorted(domains_by_id) != list(range(len(domains_by_id))):
        raise ParseError("$.variables: ids must be dense 0..d-1")
    domains = tuple(domains_by_id[i] for i in range(len(domains_by_id)))

    layer_docs = _expect(doc, "layers", list, "$")
    declared_ids = set()
    for i, ld in enumerate(layer_docs):
        lid = _expect(ld, "id", int, f"$.layers[{i}]")
        if lid in declared_ids:
            raise ParseError(f"$.layers[{i}]: duplicate layer id {lid}")
        declared_ids.add(lid)

    layers: dict[int, object] = {}
    for i, ld in enumerate(layer_docs):
        path = f"$.layers[{i}]"
        lid = ld["id"]
        kind = _expect(ld, "kind", str, path)
        if kind == "input":
            var = _expect(ld, "var", int, path)
            basis = _basis_from_doc(_expect(ld, "basis", dict, path), path + ".basis")
            width = _expect(ld, "width", int, path)
            if width != basis.size:
                raise ParseError(f"{path}.width: {width} does not match basis size {basis.size}")
            layers[lid] = InputLayer(var, basis)
        elif kind == "sum":
            ref = _expect(ld, "input", int, path)
            if ref not in declared_ids:
                raise DanglingReferenceError(f"{path}.input: no layer with id {ref}")
            rows = _expect(ld, "rows", int, path)
            cols = _expect(ld, "cols", int, path)
            weights = _pairs_to_matrix(ld.get("weights"), rows, cols, path + ".weights")
            layers[lid] = SumLayer(ref, weights)
        elif kind in ("hadamard", "kronecker"):
            refs = _expect(ld, "inputs", list, path)
            if not all(isinstance(r, int) and not isinstance(r, bool) for r in refs):
                raise ParseError(f"{path}.inputs: expected layer ids")
            for r in refs:
                if r not in declared_ids:
                    raise DanglingReferenceError(f"{path}.inputs: no layer with id {r}")
            cls = HadamardLayer if kind == "hadamard" else KroneckerLayer
            layers[lid] = cls(tuple(refs))
        else:
            raise ParseError(f"{path}.kind: unknown layer kind {kind!r}")

    root = _expect(doc, "root", int, "$")
    if root not in declared_ids:
        raise DanglingReferenceError(f"$.root: no layer with id {root}")
    return Circuit(layers, root, domains)
