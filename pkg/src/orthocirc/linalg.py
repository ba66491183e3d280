"""Dense complex kernels: thin QR, Kronecker and face-splitting products, the
Kronecker-square permutation, and (semi-)unitarity tests.

All flattenings are row-major, vec(M)[i * n + j] = M[i, j], so the identity
(A kron B) @ vec(M) = vec(A @ M @ B.T) holds without transposes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SingularityError

# Relative pivot threshold below which a QR column counts as rank-deficient.
RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Permutation:
    """Permutation stored as an index map: source entry i lands at image[i].

    Applied in O(n); materialize with :meth:`matrix` only for file export.
    """

    image: np.ndarray

    def __post_init__(self):
        image = np.asarray(self.image, dtype=np.intp)
        object.__setattr__(self, "image", image)
        n = image.shape[0]
        if image.ndim != 1 or not np.array_equal(np.sort(image), np.arange(n)):
            raise ShapeError("permutation image must be a bijection on [0, n)")

    @property
    def size(self) -> int:
        return self.image.shape[0]

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Permute along the leading axis: out[image[i]] = vec[i]."""
        vec = np.asarray(vec)
        if vec.shape[0] != self.size:
            raise ShapeError(f"permutation size {self.size} cannot apply to length {vec.shape[0]}")
        out = np.empty_like(vec)
        out[self.image] = vec
        return out

    def inverse(self) -> "Permutation":
        return Permutation(np.argsort(self.image, kind="stable"))

    def matrix(self) -> np.ndarray:
        """Dense 0/1 matrix P with P @ v == apply(v). Export use only."""
        p = np.zeros((self.size, self.size), dtype=np.complex128)
        p[self.image, np.arange(self.size)] = 1.0
        return p


def qr_thin(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR of an n x k complex matrix with n >= k.

    Returns (q, r) with a = q @ r, q^H q = I_k, and r upper triangular with a
    real non-negative diagonal; that convention makes the factorization unique
    for full-rank input.

    Raises:
        ShapeError: if n < k.
        SingularityError: if a column pivot falls below RANK_TOL * max|a|,
            naming the offending column.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"qr_thin expects a matrix, got ndim={a.ndim}")
    n, k = a.shape
    if n < k:
        raise ShapeError(f"qr_thin needs n >= k, got {n}x{k}")
    scale = float(np.abs(a).max()) if a.size else 0.0
    r = a.copy()
    q = np.eye(n, dtype=np.complex128)
    for j in range(k):
        x = r[j:, j]
        pivot = float(np.linalg.norm(x))
        if pivot <= RANK_TOL * scale:
            raise SingularityError(f"rank-deficient column {j} (pivot {pivot:.3e})")
        x0 = x[0]
        phase = x0 / abs(x0) if abs(x0) > 0.0 else 1.0 + 0.0j
        v = x.copy()
        v[0] += phase * pivot
        beta = 2.0 / np.vdot(v, v).real
        r[j:, j:] -= beta * np.outer(v, np.conj(v) @ r[j:, j:])
        q[:, j:] -= beta * np.outer(q[:, j:] @ v, np.conj(v))
    q = q[:, :k]
    r = np.triu(r[:k, :])
    # Rotate residual phases so diag(r) is exactly real and non-negative.
    d = r.diagonal().copy()
    absd = np.abs(d)
    safe = np.where(absd > 0, absd, 1.0)
    ph = np.where(absd > 0, d / safe, 1.0)
    q = q * ph[np.newaxis, :]
    r = r * np.conj(ph)[:, np.newaxis]
    np.fill_diagonal(r, absd)
    return q, r


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; (a kron b)[i*p+r, j*q+s] = a[i, j] * b[r, s].

    One-dimensional inputs give the one-dimensional tensor product with
    (u kron v)[i * len(v) + j] = u[i] * v[j].
    """
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def face_split(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Face-splitting (row-wise Kronecker) product of m x k and m x r matrices.

    Row i of the result is kron(row i of a, row i of b), giving an m x kr
    matrix.  Satisfies (face_split(a, b)) @ (x kron y) = (a @ x) * (b @ y).
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("face_split expects matrices")
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"face_split row counts differ: {a.shape[0]} vs {b.shape[0]}")
    m, k = a.shape
    r = b.shape[1]
    return (a[:, :, np.newaxis] * b[:, np.newaxis, :]).reshape(m, k * r)


def kron_square_perm(k1: int, k2: int) -> Permutation:
    """Permutation of size (k1*k2)^2 regrouping self-conjugate Kronecker pairs.

    Applying it to (a kron conj(a)) kron (b kron conj(b)) yields
    (a kron b) kron conj(a kron b) for every a in C^k1, b in C^k2: in the
    4-index row-major flattening it maps (i, i', j, j') to (i, j, i', j').
    """
    if k1 < 1 or k2 < 1:
        raise ShapeError(f"kron_square_perm needs positive widths, got ({k1}, {k2})")
    n = (k1 * k2) ** 2
    # gather[dest] = source index of multi-index (i, j, i', j')
    gather = np.arange(n, dtype=np.intp).reshape(k1, k1, k2, k2).transpose(0, 2, 1, 3).ravel()
    image = np.empty(n, dtype=np.intp)
    image[gather] = np.arange(n, dtype=np.intp)
    return Permutation(image)


def is_semi_unitary(w: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff the rows of w are orthonormal: max|w w^H - I| <= tol.

    Raises ShapeError when rows exceed columns, since more rows than columns
    can never be orthonormal.
    """
    w = np.asarray(w, dtype=np.complex128)
    if w.ndim != 2:
        raise ShapeError("is_semi_unitary expects a matrix")
    k1, k2 = w.shape
    if k1 > k2:
        raise ShapeError(f"{k1}x{k2} rows cannot be orthonormal (K1 > K2)")
    g = w @ w.conj().T
    return float(np.abs(g - np.eye(k1)).max()) <= tol
