"""
Dense symmetric linear algebra for ellipcert.

Everything the certifier needs from linear algebra lives here:
- symmetric eigendecomposition by cyclic Jacobi rotations
- relative-tolerance PSD tests and symmetric square roots
- the discrete Lyapunov solver (Kronecker vectorization)

All functions are pure: inputs are never modified and results are fresh
arrays. PSD tolerances are relative, ``tol * (1 + ||M||_F)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TypeAlias

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ellipcert.shared.exceptions import (
    InvalidInputError,
    NumericalFailureError,
    UnstableSystemError,
)
from ellipcert.shared.logger import get_logger

logger = get_logger("ellipcert.linalg")

Matrix: TypeAlias = NDArray[np.float64]

DEFAULT_TOL = 1e-9
SYMMETRY_TOL = 1e-9
JACOBI_THRESHOLD = 1e-12
JACOBI_MAX_SWEEPS = 100
LYAPUNOV_RESIDUAL_TOL = 1e-8


# ============================================
# Construction Helpers
# ============================================


def as_matrix(data: ArrayLike, name: str = "matrix") -> Matrix:
    """Convert to a finite 2-D float64 array with at least one row and column."""
    try:
        m = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}", field=name) from exc
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInputError(
            f"{name} must be a non-empty 2-D matrix, got shape {m.shape}", field=name
        )
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} has non-finite entries", field=name)
    return m


def frobenius(m: Matrix) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(m, "fro"))


def symmetrize(m: Matrix) -> Matrix:
    """Return (M + M^T) / 2."""
    return 0.5 * (m + m.T)


def require_symmetric(
    m: ArrayLike, name: str = "matrix", tol: float = SYMMETRY_TOL
) -> Matrix:
    """
    Validate a square, nearly symmetric matrix and return its symmetrization.

    Asymmetry is measured relative to the matrix scale:
    ``||M - M^T||_F <= tol * (1 + ||M||_F)``.
    """
    mat = as_matrix(m, name)
    if mat.shape[0] != mat.shape[1]:
        raise InvalidInputError(f"{name} must be square, got {mat.shape}", field=name)
    asym = frobenius(mat - mat.T)
    if asym > tol * (1.0 + frobenius(mat)):
        raise InvalidInputError(
            f"{name} is not symmetric (||M - M^T||_F = {asym:.3e})", field=name
        )
    return symmetrize(mat)


# ============================================
# Symmetric Eigendecomposition
# ============================================


@dataclass(frozen=True)
class SymEigen:
    """Spectral decomposition M = V diag(eigenvalues) V^T, eigenvalues ascending."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: Matrix

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> Matrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _off_diagonal_norm(a: Matrix) -> float:
    upper = np.triu(a, k=1)
    return float(np.sqrt(2.0 * np.sum(upper * upper)))


def _rotate(a: Matrix, v: Matrix, p: int, q: int) -> None:
    """Apply one Jacobi rotation in place, annihilating a[p, q]."""
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        sign = 1.0 if theta >= 0.0 else -1.0
        t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def sym_eigen(m: ArrayLike) -> SymEigen:
    """
    Full spectral decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps stop once the off-diagonal Frobenius norm drops to
    ``1e-12 * ||M||_F``; more than 100 sweeps is a numerical failure.

    Raises:
        InvalidInputError: non-square or asymmetric beyond 1e-9 relative
        NumericalFailureError: no convergence within the sweep cap
    """
    a = require_symmetric(m, "eigen input").copy()
    size = a.shape[0]
    v = np.eye(size)
    threshold = JACOBI_THRESHOLD * frobenius(a)

    sweeps = 0
    while _off_diagonal_norm(a) > threshold:
        if sweeps == JACOBI_MAX_SWEEPS:
            logger.error("jacobi_not_converged", size=size, sweeps=sweeps)
            raise NumericalFailureError(
                f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )
        for p in range(size - 1):
            for q in range(p + 1, size):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)
        sweeps += 1

    order = np.argsort(np.diag(a), kind="stable")
    return SymEigen(eigenvalues=np.diag(a)[order].copy(), eigenvectors=v[:, order])


# ============================================
# PSD Tests and Square Roots
# ============================================


def psd_floor(m: Matrix, tol: float) -> float:
    """The most negative eigenvalue still accepted as PSD: ``-tol * (1 + ||M||_F)``."""
    return -tol * (1.0 + frobenius(m))


def min_eigenvalue(m: ArrayLike) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    return sym_eigen(m).min


def is_psd(m: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * (1 + ||M||_F)``."""
    mat = require_symmetric(m)
    return sym_eigen(mat).min >= psd_floor(mat, tol)


def clamp_psd(m: ArrayLike, tol: float = DEFAULT_TOL, name: str = "matrix") -> Matrix:
    """
    Symmetrize and clamp eigenvalues within tolerance of zero to zero.

    Raises:
        InvalidInputError: if an eigenvalue is below the PSD floor
    """
    mat = require_symmetric(m, name)
    eig = sym_eigen(mat)
    if eig.min < psd_floor(mat, tol):
        raise InvalidInputError(
            f"{name} is not positive semidefinite (min eigenvalue {eig.min:.3e})",
            field=name,
        )
    if eig.min >= 0.0:
        return mat
    clamped = SymEigen(np.maximum(eig.eigenvalues, 0.0), eig.eigenvectors)
    return symmetrize(clamped.reconstruct())


def sym_sqrt(m: ArrayLike, tol: float = DEFAULT_TOL) -> Matrix:
    """
    Symmetric PSD square root S with S @ S = M.

    Raises:
        InvalidInputError: if M is not PSD within tolerance
    """
    mat = require_symmetric(m, "sqrt input")
    eig = sym_eigen(mat)
    if eig.min < psd_floor(mat, tol):
        raise InvalidInputError(
            f"square root needs a PSD matrix (min eigenvalue {eig.min:.3e})"
        )
    roots = np.sqrt(np.maximum(eig.eigenvalues, 0.0))
    return symmetrize(SymEigen(roots, eig.eigenvectors).reconstruct())


def sym_inverse(m: ArrayLike) -> Matrix:
    """Inverse of a symmetric positive definite matrix through its spectrum."""
    eig = sym_eigen(m)
    if eig.min <= 0.0:
        raise InvalidInputError(
            f"matrix is not positive definite (min eigenvalue {eig.min:.3e})"
        )
    return symmetrize(SymEigen(1.0 / eig.eigenvalues, eig.eigenvectors).reconstruct())


# ============================================
# Discrete Lyapunov Equation
# ============================================


@dataclass(frozen=True)
class LyapunovSolution:
    """Solution P of A^T P A - P = -Q with its largest eigenvalue and residual."""

    p: Matrix
    sigma_max: float
    residual: float


def lyapunov_residual(a: Matrix, p: Matrix, q: Matrix) -> float:
    """||A^T P A - P + Q||_F."""
    return frobenius(a.T @ p @ a - p + q)


def solve_discrete_lyapunov(
    a: ArrayLike, q: ArrayLike, tol: float = DEFAULT_TOL
) -> LyapunovSolution:
    """
    Solve A^T P A - P = -Q by vectorization.

    With column-major vec, vec(A^T P A) = (A^T kron A^T) vec(P), so
    (I - A^T kron A^T) vec(P) = vec(Q) is solved densely and P symmetrized.
    A positive definite P is the stability certificate for x -> A x.

    Raises:
        InvalidInputError: shape mismatch, or Q not symmetric positive definite
        UnstableSystemError: singular system or P not positive definite
    """
    a_mat = as_matrix(a, "A")
    m = a_mat.shape[0]
    if a_mat.shape != (m, m):
        raise InvalidInputError(f"A must be square, got {a_mat.shape}", field="A")
    q_mat = require_symmetric(q, "Q")
    if q_mat.shape != (m, m):
        raise InvalidInputError(
            f"Q must be {m}x{m} to match A, got {q_mat.shape}", field="Q"
        )
    if sym_eigen(q_mat).min <= tol * (1.0 + frobenius(q_mat)):
        raise InvalidInputError("Q must be positive definite", field="Q")

    at = a_mat.T
    system = np.eye(m * m) - np.kron(at, at)
    rhs = q_mat.reshape(-1, order="F")
    try:
        vec_p = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        logger.warning("lyapunov_system_singular", size=m)
        raise UnstableSystemError(
            "Lyapunov system is singular: A has reciprocal eigenvalue pairs "
            "(spectral radius >= 1)"
        ) from exc

    p = symmetrize(vec_p.reshape((m, m), order="F"))
    residual = lyapunov_residual(a_mat, p, q_mat)
    if not np.isfinite(residual) or residual > LYAPUNOV_RESIDUAL_TOL * (
        1.0 + frobenius(q_mat)
    ):
        logger.warning("lyapunov_residual_too_large", size=m, residual=residual)
        raise UnstableSystemError(
            f"Lyapunov system is numerically singular (residual {residual:.3e})"
        )

    eig = sym_eigen(p)
    if eig.min <= tol * (1.0 + frobenius(p)):
        logger.info("lyapunov_solution_not_pd", size=m, min_eigenvalue=eig.min)
        raise UnstableSystemError(
            f"Lyapunov solution is not positive definite (min eigenvalue "
            f"{eig.min:.3e}): the system is not asymptotically stable",
            min_eigenvalue=eig.min,
        )

    logger.debug(
        "lyapunov_solved", size=m, sigma_max=eig.max, residual=residual
    )
    return LyapunovSolution(p=p, sigma_max=eig.max, residual=residual)
