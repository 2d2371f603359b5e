"""
Degenerate-safe centered ellipsoids in R-representation.

An ellipsoid E_R is the set of z with [[R, z], [z^T, 1]] PSD. Singular R
describes a bounded, flat ellipsoid, so no inverse of R is ever formed.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ellipcert.linalg.matrixkit import (
    DEFAULT_TOL,
    Matrix,
    as_matrix,
    clamp_psd,
    is_psd,
    psd_floor,
    sym_eigen,
    sym_sqrt,
    symmetrize,
)
from ellipcert.shared.exceptions import InvalidInputError


@dataclass(frozen=True)
class Ellipsoid:
    """Centered ellipsoid E_R; ``matrix`` is symmetric PSD."""

    matrix: Matrix

    def __post_init__(self) -> None:
        frozen = np.array(self.matrix, dtype=np.float64)
        frozen.setflags(write=False)
        object.__setattr__(self, "matrix", frozen)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def scaled(self, factor: float) -> Ellipsoid:
        """E_{factor * R}; a factor c scales every semi-axis by sqrt(c)."""
        if factor < 0.0:
            raise InvalidInputError("ellipsoid scale factor must be non-negative")
        return Ellipsoid(factor * self.matrix)


def make_ellipsoid(r: ArrayLike, tol: float = DEFAULT_TOL) -> Ellipsoid:
    """
    Build E_R from a symmetric PSD matrix.

    The stored matrix is (R + R^T) / 2 with eigenvalues inside the
    tolerance band clamped to zero.

    Raises:
        InvalidInputError: non-square, asymmetric, or indefinite R
    """
    return Ellipsoid(clamp_psd(r, tol, name="ellipsoid matrix"))


def _vector(z: ArrayLike, dim: int) -> NDArray[np.float64]:
    vec = np.asarray(z, dtype=np.float64).reshape(-1)
    if vec.shape[0] != dim:
        raise InvalidInputError(
            f"point has dimension {vec.shape[0]}, ellipsoid has {dim}"
        )
    return vec


def bordered(e: Ellipsoid, z: ArrayLike) -> Matrix:
    """The (d+1)x(d+1) matrix [[R, z], [z^T, 1]]."""
    vec = _vector(z, e.dim)
    out = np.empty((e.dim + 1, e.dim + 1))
    out[: e.dim, : e.dim] = e.matrix
    out[: e.dim, e.dim] = vec
    out[e.dim, : e.dim] = vec
    out[e.dim, e.dim] = 1.0
    return out


def member(e: Ellipsoid, z: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    """True iff [[R, z], [z^T, 1]] is PSD within tolerance."""
    return is_psd(bordered(e, z), tol)


def member_batch(
    e: Ellipsoid, points: ArrayLike, tol: float = DEFAULT_TOL
) -> NDArray[np.bool_]:
    """
    Membership of many points at once.

    Same bordered-matrix test and tolerance rule as :func:`member`, with
    the stacked (d+1)-matrices handed to LAPACK in one batched call.
    """
    zs = np.asarray(points, dtype=np.float64)
    if zs.ndim != 2 or zs.shape[1] != e.dim:
        raise InvalidInputError(
            f"points must have shape (k, {e.dim}), got {zs.shape}"
        )
    count = zs.shape[0]
    if count == 0:
        return np.zeros(0, dtype=bool)
    stack = np.empty((count, e.dim + 1, e.dim + 1))
    stack[:, : e.dim, : e.dim] = e.matrix
    stack[:, : e.dim, e.dim] = zs
    stack[:, e.dim, : e.dim] = zs
    stack[:, e.dim, e.dim] = 1.0
    floors = -tol * (1.0 + np.linalg.norm(stack, ord="fro", axis=(1, 2)))
    lowest = np.linalg.eigvalsh(stack)[:, 0]
    return np.asarray(lowest >= floors)


def image(e: Ellipsoid, t: ArrayLike) -> Ellipsoid:
    """
    Image of E_R under z -> T z, which is E_{T R T^T}.

    Raises:
        InvalidInputError: T does not have d columns
    """
    tm = as_matrix(t, "transformation")
    if tm.shape[1] != e.dim:
        raise InvalidInputError(
            f"transformation has {tm.shape[1]} columns, ellipsoid has dimension {e.dim}"
        )
    return Ellipsoid(symmetrize(tm @ e.matrix @ tm.T))


def _same_dim(a: Ellipsoid, b: Ellipsoid) -> None:
    if a.dim != b.dim:
        raise InvalidInputError(f"dimension mismatch: {a.dim} vs {b.dim}")


def containment_margin(outer: Ellipsoid, inner: Ellipsoid) -> float:
    """Smallest eigenvalue of outer.R - inner.R (non-negative iff inner is inside)."""
    _same_dim(outer, inner)
    return sym_eigen(outer.matrix - inner.matrix).min


def contains(outer: Ellipsoid, inner: Ellipsoid, tol: float = DEFAULT_TOL) -> bool:
    """True iff outer.R - inner.R is PSD within tolerance, i.e. inner is a subset."""
    _same_dim(outer, inner)
    diff = outer.matrix - inner.matrix
    return sym_eigen(diff).min >= psd_floor(diff, tol)


def variable_bound(e: Ellipsoid, i: int) -> float:
    """Exact maximum of |z_i| over E_R, sqrt(R[i, i])."""
    if not 0 <= i < e.dim:
        raise InvalidInputError(f"coordinate {i} out of range [0, {e.dim})")
    return float(np.sqrt(max(e.matrix[i, i], 0.0)))


def semi_axes(e: Ellipsoid) -> NDArray[np.float64]:
    """Semi-axis lengths, largest first."""
    return np.sqrt(np.maximum(sym_eigen(e.matrix).eigenvalues[::-1], 0.0))


def bounding_ball(ellipsoids: Sequence[Ellipsoid]) -> float:
    """
    Radius of the smallest centered ball containing every listed ellipsoid.

    Raises:
        InvalidInputError: empty list or mixed dimensions
    """
    if not ellipsoids:
        raise InvalidInputError("bounding ball needs at least one ellipsoid")
    dim = ellipsoids[0].dim
    if any(e.dim != dim for e in ellipsoids):
        raise InvalidInputError("bounding ball needs ellipsoids of one dimension")
    return max(float(semi_axes(e)[0]) for e in ellipsoids)


def boundary_points(e: Ellipsoid, directions: ArrayLike) -> NDArray[np.float64]:
    """
    Map directions onto the boundary: sqrt(R) u / ||u|| for each row u.

    Zero directions map to the center.
    """
    dirs = np.asarray(directions, dtype=np.float64)
    if dirs.ndim != 2 or dirs.shape[1] != e.dim:
        raise InvalidInputError(
            f"directions must have shape (k, {e.dim}), got {dirs.shape}"
        )
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    units = np.divide(dirs, norms, out=np.zeros_like(dirs), where=norms > 0.0)
    return units @ sym_sqrt(e.matrix).T
