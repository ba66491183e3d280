"""Exception types shared across the package."""


class OrthocircError(Exception):
    """Base class for all package errors."""


class StructuralError(OrthocircError):
    """The circuit graph violates a structural invariant (cycle, dangling
    reference, unreachable layer, bad arity or widths)."""


class InputError(OrthocircError):
    """An assignment or query argument is malformed or out of domain."""


class ShapeError(OrthocircError):
    """Matrix or vector shapes are incompatible with the requested operation."""


class SingularityError(OrthocircError):
    """A factorization hit a numerically rank-deficient column."""


class PreconditionError(OrthocircError):
    """The circuit does not satisfy a documented precondition of the algorithm."""


class BudgetError(OrthocircError):
    """An exhaustive computation would exceed the configured budget."""


class PrecisionError(OrthocircError):
    """A quadrature order is too small for the documented accuracy."""


class NumericalError(OrthocircError):
    """A result violates a numerical sanity bound; this signals a bug or a
    degenerate input, not ordinary roundoff."""


class CircuitIOError(OrthocircError):
    """Base class for circuit file errors."""


class ParseError(CircuitIOError):
    """The document does not match the circuit file schema."""


class DanglingReferenceError(CircuitIOError):
    """A layer or root id refers to a layer that is not in the document."""


class VersionError(CircuitIOError):
    """The document declares an unsupported format version."""
