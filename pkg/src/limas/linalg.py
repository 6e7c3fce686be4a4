"""Dense real linear algebra kernels used throughout the toolkit.

Everything operates on plain float64 numpy arrays. Problem sizes stay
small (agent dimension n <= ~10, stacked dimension N*n <= ~100), so the
routines favor accuracy and determinism over scale: symmetric problems
go through ``eigh``, general spectra through ``eigvals``, ranks through
singular values.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInput, NoConvergence, NotSymmetric, ShapeMismatch

# Symmetry tolerance, relative to the Frobenius norm of the input.
SYMMETRY_RTOL = 1e-9
# Controllability rank threshold is n * sigma_max * RANK_RTOL.
RANK_RTOL = 1e-12


def as_matrix(obj, rows: int | None = None, cols: int | None = None,
              name: str = "matrix") -> np.ndarray:
    """Coerce to a finite float64 2-D array, optionally enforcing its shape.

    Scalars become 1x1 and 1-D sequences become a single row. Non-finite
    entries are rejected so NaN/Inf never enter downstream computations.
    """
    M = np.atleast_2d(np.asarray(obj, dtype=float))
    if M.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got {M.ndim}-D")
    if rows is not None and M.shape[0] != rows:
        raise ShapeMismatch(f"{name} must have {rows} rows, got {M.shape[0]}")
    if cols is not None and M.shape[1] != cols:
        raise ShapeMismatch(f"{name} must have {cols} columns, got {M.shape[1]}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def as_square(obj, name: str = "matrix") -> np.ndarray:
    M = as_matrix(obj, name=name)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {M.shape[0]}x{M.shape[1]}")
    return M


class EigenSym(NamedTuple):
    """Eigen-decomposition of a symmetric matrix.

    ``values`` are ascending; ``vectors`` holds the matching orthonormal
    eigenvectors as columns.
    """

    values: np.ndarray
    vectors: np.ndarray


def eig_sym(M) -> EigenSym:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    M = as_square(M)
    scale = float(np.linalg.norm(M))
    if float(np.linalg.norm(M - M.T)) > SYMMETRY_RTOL * scale:
        raise NotSymmetric(f"matrix is not symmetric within {SYMMETRY_RTOL:g} relative")
    try:
        values, vectors = np.linalg.eigh((M + M.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return EigenSym(values, vectors)


def eig_general(M) -> np.ndarray:
    """All eigenvalues of a square matrix as an unordered complex array.

    Real inputs yield spectra closed under conjugation.
    """
    M = as_square(M)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def spectral_radius(M) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    values = eig_general(M)
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values)))


def determinant(M) -> float:
    """Determinant via LU factorization; singular inputs simply return 0."""
    return float(np.linalg.det(as_square(M)))


def is_controllable(M, B, rank_rtol: float = RANK_RTOL) -> bool:
    """Kalman rank test: [B, MB, ..., M^(n-1)B] must have full row rank.

    Rank is decided from singular values with threshold
    ``n * sigma_max * rank_rtol``.
    """
    M = as_square(M, name="M")
    B = as_matrix(B, name="B")
    n = M.shape[0]
    if B.shape[0] != n:
        raise ShapeMismatch(f"B must have {n} rows, got {B.shape[0]}")
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(M @ blocks[-1])
    ctrb = np.hstack(blocks)
    sv = np.linalg.svd(ctrb, compute_uv=False)
    threshold = n * sv[0] * rank_rtol
    return int(np.count_nonzero(sv > threshold)) == n


def controllability_margin(M, B) -> float:
    """Smallest singular value of the controllability matrix (0 when rank falls short)."""
    M = as_square(M, name="M")
    B = as_matrix(B, name="B")
    blocks = [B]
    for _ in range(M.shape[0] - 1):
        blocks.append(M @ blocks[-1])
    sv = np.linalg.svd(np.hstack(blocks), compute_uv=False)
    return float(sv[-1]) if sv.size >= M.shape[0] else 0.0


def gain_kernel(P, B, A) -> np.ndarray:
    """Feedback direction ``(B'PB)^{-1} B'PA`` induced by a Riccati solution P.

    B must be a single column; raises DegenerateInput when B'PB is not
    safely positive relative to the size of P.
    """
    P = as_square(P, name="P")
    n = P.shape[0]
    B = as_matrix(B, rows=n, cols=1, name="B")
    A = as_matrix(A, rows=n, cols=n, name="A")
    btpb = float((B.T @ P @ B).item())
    if btpb <= 1e-14 * float(np.linalg.norm(P)):
        raise DegenerateInput(f"B'PB = {btpb:g} is not safely positive")
    return (B.T @ P @ A) / btpb


def ones_completion(n: int) -> np.ndarray:
    """Orthogonal basis whose first column is the normalized all-ones vector.

    The remaining columns come from a QR factorization of
    [1/sqrt(n), e_1, ..., e_{n-1}] with signs pinned, so the completion is
    deterministic and reproducible.
    """
    if n < 1:
        raise ShapeMismatch("completion needs n >= 1")
    M = np.empty((n, n))
    M[:, 0] = 1.0 / math.sqrt(n)
    M[:, 1:] = np.eye(n)[:, : n - 1]
    Q, R = np.linalg.qr(M)
    Q = Q * np.sign(np.diag(R))
    Q[:, 0] = 1.0 / math.sqrt(n)
    return Q
