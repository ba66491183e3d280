"""Squared orthonormal tensorized circuits.

Build and validate structured-decomposable circuits over complex parameters,
square them into normalized-by-construction distributions, marginalize
quickly by exploiting orthonormality, and orthonormalize arbitrary circuits
through QR factorizations — all checked against brute-force and quadrature
oracles.
"""

from .bases import (
    ORTHONORMAL_FAMILIES,
    Fourier,
    Hermite,
    Indicator,
    Legendre,
    QuadratureRule,
    default_quadrature_order,
    eval_basis,
    gram,
    gram_numeric,
    quadrature_rule,
)
from .circuit import (
    Circuit,
    HadamardLayer,
    InputLayer,
    KroneckerLayer,
    PermutedKroneckerLayer,
    SumLayer,
    ValidationReport,
    evaluate,
    feed_forward,
    feed_forward_batch,
    layer_size,
    max_layer_size,
    topological_order,
    validate,
)
from .domains import Finite, Interval, RealLine, UnitPeriodic
from .errors import (
    BudgetError,
    CircuitIOError,
    DanglingReferenceError,
    InputError,
    NumericalError,
    OrthocircError,
    ParseError,
    PrecisionError,
    PreconditionError,
    ShapeError,
    SingularityError,
    StructuralError,
    VersionError,
)
from .generator import (
    GenSpec,
    VTreeLeaf,
    VTreeNode,
    build_random_circuit,
    generate_circuit,
    random_vtree,
    vtree_depth,
    vtree_scope,
)
from .io import read_circuit, write_circuit
from .linalg import (
    Permutation,
    face_split,
    is_semi_unitary,
    kron,
    kron_square_perm,
    qr_thin,
)
from .marginalize import (
    MacCounter,
    MarginalCostReport,
    ScopePartition,
    classify_scopes,
    cost_report,
    marginal_fast,
    marginal_naive,
    marginal_with_report,
)
from .oracle import OracleBudget, brute_force_marginal, brute_force_z, quadrature_z
from .orthonormalize import (
    OrthonormalizeResult,
    orthonormalize,
    partition_function_via_orthonormalize,
)
from .squaring import (
    SquaredBasis,
    SquaredCircuit,
    evaluate_squared_integrated,
    square_circuit,
)

__version__ = "0.1.0"
