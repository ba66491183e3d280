"""Scope classification and both marginalization routes.

The naive route squares the whole circuit and integrates it, costing on the
order of the squared layer sizes for every layer.  The fast route exploits
orthonormality: layers scoped inside the marginalized set integrate to
identity matrices and are skipped outright, layers scoped inside the kept set
are evaluated at their original width, and only the layers straddling both
sets are evaluated at squared width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuit import (
    Circuit,
    HadamardLayer,
    InputLayer,
    SumLayer,
    feed_forward,
    max_layer_size,
    topological_order,
    validate,
)
from .errors import InputError, PreconditionError
from .linalg import kron, kron_square_perm
from .squaring import clamp_real, evaluate_squared_integrated, square_circuit

# Per-layer MAC total of the fast route never exceeds
# FAST_BOUND_CONSTANT * (|phi_Y| * S + |phi_YZ| * S^2).
FAST_BOUND_CONSTANT = 3


@dataclass(frozen=True)
class ScopePartition:
    """Layer ids split by scope: inside Y, inside Z, or straddling both."""

    phi_y: frozenset[int]
    phi_z: frozenset[int]
    phi_yz: frozenset[int]


class MacCounter:
    """Exact multiply-accumulate tally; one complex multiply-add counts 1,
    permutations count 0, and basis evaluations count 0."""

    def __init__(self):
        self.total = 0
        self.by_layer: dict[int, int] = {}
        self.squared_layers: set[int] = set()

    def add(self, lid: int, n: int) -> None:
        self.total += n
        self.by_layer[lid] = self.by_layer.get(lid, 0) + n

    def mark_squared(self, lid: int) -> None:
        self.squared_layers.add(lid)


@dataclass(frozen=True)
class MarginalCostReport:
    """Deterministic operation counts for one marginal query.

    `total_macs` and `by_layer` are exact counts, not estimates.  For the
    fast method, `total_macs <= bound_constant * (phi_y * S + phi_yz * S^2)`
    with S = `max_layer_size`, and `squared_width_layers` equals the number
    of layers evaluated at squared width (exactly |phi_YZ|).
    """

    method: str
    layer_count: int
    max_layer_size: int
    phi_y: int
    phi_z: int
    phi_yz: int
    total_macs: int
    by_layer: Mapping[int, int] = field(default_factory=dict)
    squared_width_layers: int = 0
    bound_constant: int = FAST_BOUND_CONSTANT

    @property
    def fast_bound(self) -> int:
        s = self.max_layer_size
        return self.bound_constant * (self.phi_y * s + self.phi_yz * s * s)


def classify_scopes(c: Circuit, z: frozenset[int]) -> ScopePartition:
    """Partition the layers of c by their relation to the marginalized set z."""
    z = frozenset(z)
    unknown = sorted(z - c.full_scope())
    if unknown:
        raise InputError(f"marginalized variables not in circuit: {unknown}")
    phi_y, phi_z, phi_yz = set(), set(), set()
    for lid in c.layers:
        sc = c.scope(lid)
        if sc <= z:
            phi_z.add(lid)
        elif sc.isdisjoint(z):
            phi_y.add(lid)
        else:
            phi_yz.add(lid)
    return ScopePartition(frozenset(phi_y), frozenset(phi_z), frozenset(phi_yz))


def _check_query(c: Circuit, y: Mapping[int, object], z: frozenset[int]) -> frozenset[int]:
    z = frozenset(z)
    unknown = sorted(z - c.full_scope())
    if unknown:
        raise InputError(f"marginalized variables not in circuit: {unknown}")
    kept = c.full_scope() - z
    if set(y) != set(kept):
        overlap = sorted(set(y) & z)
        if overlap:
            raise InputError(f"evidence overlaps marginalized variables: {overlap}")
        raise InputError(f"evidence must cover exactly the kept variables {sorted(kept)}")
    return z


def marginal_naive(c: Circuit, y: Mapping[int, object], z: frozenset[int], counter=None) -> float:
    """Marginalize by squaring the whole circuit and integrating it.

    Returns the unnormalized mass ``integral over z of |c(y, z)|^2``; for an
    orthonormal circuit this is the marginal probability p(y) since the
    total mass is 1.
    """
    z = _check_query(c, y, z)
    sq = square_circuit(c)  # raises PreconditionError when not structured-decomposable
    return evaluate_squared_integrated(sq, y, z, counter=counter)


def marginal_fast(c: Circuit, y: Mapping[int, object], z: frozenset[int], counter=None) -> float:
    """Marginalize an orthonormal circuit without squaring it wholesale.

    Layers scoped inside z are never evaluated; layers scoped inside the kept
    set are evaluated at original width; only straddling layers run at
    squared width.  Two closed-form special cases: z empty returns
    |c(y)|^2 and z covering all variables returns exactly 1.0 without
    touching any layer.

    Raises PreconditionError when the circuit is not orthonormal (the result
    would be wrong, not merely slow) or not structured-decomposable.
    """
    report = validate(c)
    if not report.orthonormal or not report.structured_decomposable:
        raise PreconditionError(
            "fast marginalization needs an orthonormal, structured-decomposable circuit: "
            + "; ".join(f"layer {lid}: {why}" for lid, why in report.violations[:3])
        )
    z = _check_query(c, y, z)
    if z == c.full_scope():
        return 1.0
    if not z:
        value = feed_forward(c, y, counter=counter)[c.root][0]
        if counter is not None:
            counter.add(c.root, 1)
        return float(abs(value) ** 2)

    out: dict[int, np.ndarray] = {}
    mar: dict[int, np.ndarray] = {}

    def squared_side(lid: int) -> np.ndarray:
        sc = c.scope(lid)
        if sc <= z:
            k = c.width(lid)
            return np.eye(k, dtype=np.complex128).ravel()
        if sc.isdisjoint(z):
            v = out[lid]
            if counter is not None:
                counter.add(lid, v.shape[0] ** 2)
            return np.kron(v, v.conj())
        return mar[lid]

    for lid in topological_order(c):
        sc = c.scope(lid)
        if sc <= z:
            continue
        layer = c.layers[lid]
        if isinstance(layer, InputLayer):
            try:
                out[lid] = layer.basis.eval(y[layer.var])
            except InputError as exc:
                raise InputError(f"variable {layer.var}: {exc}") from exc
        elif isinstance(layer, SumLayer):
            if sc.isdisjoint(z):
                out[lid] = layer.weights @ out[layer.input]
                if counter is not None:
                    counter.add(lid, layer.weights.size)
            else:
                w2 = kron(layer.weights, layer.weights.conj())
                mar[lid] = w2 @ mar[layer.input]
                if counter is not None:
                    counter.add(lid, w2.size)
                    counter.mark_squared(lid)
        elif sc.isdisjoint(z):
            a, b = (out[i] for i in layer.inputs)
            if isinstance(layer, HadamardLayer):
                out[lid] = a * b
                if counter is not None:
                    counter.add(lid, a.shape[0])
            else:
                out[lid] = np.kron(a, b)
                if counter is not None:
                    counter.add(lid, a.shape[0] * b.shape[0])
        else:
            o1 = squared_side(layer.inputs[0])
            o2 = squared_side(layer.inputs[1])
            if isinstance(layer, HadamardLayer):
                mar[lid] = o1 * o2
                if counter is not None:
                    counter.add(lid, o1.shape[0])
            else:
                w1, w2 = (c.width(i) for i in layer.inputs)
                mar[lid] = kron_square_perm(w1, w2).apply(np.kron(o1, o2))
                if counter is not None:
                    counter.add(lid, o1.shape[0] * o2.shape[0])
            if counter is not None:
                counter.mark_squared(lid)
    return clamp_real(complex(mar[c.root][0]), "fast marginal")


def _run_method(c: Circuit, y, z, method: str, counter: MacCounter) -> float:
    if method == "fast":
        return marginal_fast(c, y, z, counter=counter)
    if method == "naive":
        return marginal_naive(c, y, z, counter=counter)
    raise InputError(f"unknown marginalization method {method!r}")


def marginal_with_report(
    c: Circuit, y: Mapping[int, object], z: frozenset[int], method: str
) -> tuple[float, MarginalCostReport]:
    """Run one marginal query and report its exact operation counts."""
    z = frozenset(z)
    counter = MacCounter()
    value = _run_method(c, y, z, method, counter)
    part = classify_scopes(c, z)
    report = MarginalCostReport(
        method=method,
        layer_count=len(c.layers),
        max_layer_size=max_layer_size(c),
        phi_y=len(part.phi_y),
        phi_z=len(part.phi_z),
        phi_yz=len(part.phi_yz),
        total_macs=counter.total,
        by_layer=dict(counter.by_layer),
        squared_width_layers=len(counter.squared_layers),
    )
    return value, report


def cost_report(c: Circuit, y: Mapping[int, object], z: frozenset[int], method: str) -> MarginalCostReport:
    """Exact multiply-accumulate counts for one marginal query."""
    return marginal_with_report(c, y, z, method)[1]
