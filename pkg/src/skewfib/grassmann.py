"""Oriented planes, affine planes, and great spheres as orthonormal frames.

An affine k-plane in R^n embeds into the oriented Grassmannian of
(k+1)-planes in R^(n+1): the plane with direction P and base point b maps
to the span of {(d, 0) : d in P} and (b, 1).  Two affine planes are skew
exactly when their embedded (k+1)-planes meet only at the origin, which
reduces every skewness question to a rank computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotInChart
from .numeric import Tolerance, orthonormal_complement, orthonormalize


@dataclass(frozen=True)
class OrientedPlane:
    """Linear k-plane in R^n: orthonormal n x k frame, columns ordered."""

    frame: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", f)
        if f.ndim != 2 or not (1 <= f.shape[1] <= f.shape[0]):
            raise InvalidInput(f"bad frame shape {f.shape}")
        gram = f.T @ f
        if np.max(np.abs(gram - np.eye(f.shape[1]))) > 1e-12:
            raise InvalidInput("frame columns are not orthonormal to 1e-12")

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def k(self) -> int:
        return self.frame.shape[1]


@dataclass(frozen=True)
class AffinePlane:
    """Affine k-plane: direction plane plus base point orthogonal to it."""

    direction: OrientedPlane
    base: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float)
        object.__setattr__(self, "base", b)
        if b.shape != (self.direction.n,):
            raise InvalidInput(f"base shape {b.shape} does not match n={self.direction.n}")
        overlap = float(np.linalg.norm(self.direction.frame.T @ b))
        if overlap > 1e-10 * (1.0 + float(np.linalg.norm(b))):
            raise InvalidInput(f"base is not orthogonal to direction: |proj|={overlap:.3e}")

    @property
    def n(self) -> int:
        return self.direction.n

    @property
    def k(self) -> int:
        return self.direction.k


@dataclass(frozen=True)
class GreatSphere:
    """Great k-sphere of S^n: the unit sphere of a (k+1)-plane in R^(n+1)."""

    frame: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", f)
        if f.ndim != 2 or not (1 <= f.shape[1] <= f.shape[0]):
            raise InvalidInput(f"bad frame shape {f.shape}")
        gram = f.T @ f
        if np.max(np.abs(gram - np.eye(f.shape[1]))) > 1e-12:
            raise InvalidInput("frame columns are not orthonormal to 1e-12")

    @property
    def k(self) -> int:
        return self.frame.shape[1] - 1

    def points(self, params: np.ndarray) -> np.ndarray:
        """Map unit parameter vectors (rows) to sphere points."""
        return np.asarray(params, dtype=float) @ self.frame.T


def plane_from_columns(cols: np.ndarray, tol: Tolerance | None = None) -> OrientedPlane:
    """Oriented plane spanned by the given columns, in their orientation."""
    return OrientedPlane(orthonormalize(cols, tol))


def graph_plane(u: OrientedPlane, bmat: np.ndarray, tol: Tolerance | None = None) -> OrientedPlane:
    """Graph of a linear map from u to its orthocomplement.

    bmat is (n-k) x k in the complement basis returned by
    orthonormal_complement(u.frame); column j tilts the j-th frame vector.
    Orientation is induced from u's column order.
    """
    bmat = np.asarray(bmat, dtype=float)
    comp = orthonormal_complement(u.frame, tol)
    if bmat.shape != (comp.shape[1], u.k):
        raise InvalidInput(f"bmat shape {bmat.shape} != ({comp.shape[1]}, {u.k})")
    return plane_from_columns(u.frame + comp @ bmat, tol)


def chart_inverse(u: OrientedPlane, w: OrientedPlane, tol: Tolerance | None = None) -> np.ndarray:
    """The unique bmat with graph_plane(u, bmat) spanning w.

    Fails with NotInChart when w has a direction orthogonal to u, i.e.
    when the projection of w's frame onto u is singular.
    """
    tol = tol or Tolerance.default()
    if w.n != u.n or w.k != u.k:
        raise InvalidInput("planes must share n and k")
    comp = orthonormal_complement(u.frame, tol)
    x = u.frame.T @ w.frame
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[-1] <= tol.threshold(sv[0] if sv.size else 0.0):
        raise NotInChart(f"projection onto the reference plane is singular: sigma_min={sv[-1]:.3e}")
    y = comp.T @ w.frame
    return y @ np.linalg.inv(x)


def embed_affine(p: AffinePlane, tol: Tolerance | None = None) -> OrientedPlane:
    """Linearize an affine k-plane to a (k+1)-plane in R^(n+1).

    The frame is the direction columns padded with a zero last coordinate,
    followed by the normalized (base, 1) column; base is orthogonal to the
    direction, so the result is already orthonormal.
    """
    d = p.direction.frame
    k = p.k
    top = np.vstack([d, np.zeros((1, k))])
    last = np.append(p.base, 1.0)
    last = last / np.linalg.norm(last)
    return OrientedPlane(np.column_stack([top, last]))


def intersection_dim(
    u: OrientedPlane, w: OrientedPlane, tol: Tolerance | None = None
) -> tuple[int, float]:
    """Dimension of span(u) intersect span(w), with the smallest singular
    value of the concatenated frame as the transversality gap."""
    tol = tol or Tolerance.default()
    if u.n != w.n:
        raise InvalidInput("planes live in different ambient dimensions")
    concat = np.hstack([u.frame, w.frame])
    sv = np.linalg.svd(concat, compute_uv=False)
    cutoff = tol.threshold(float(sv[0]))
    rank = int(np.sum(sv > cutoff))
    # More columns than the ambient dimension forces a nontrivial meet.
    gap = float(sv[-1]) if concat.shape[1] <= concat.shape[0] else 0.0
    return u.k + w.k - rank, gap


def skew_pair(p: AffinePlane, q: AffinePlane, tol: Tolerance | None = None) -> tuple[bool, float]:
    """Whether two affine planes are skew (disjoint and nonparallel).

    Skew iff their linearized (k+1)-planes intersect trivially; the gap is
    the smallest singular value of the concatenated embedded frames.
    """
    dim, gap = intersection_dim(embed_affine(p, tol), embed_affine(q, tol), tol)
    return dim == 0, gap


def principal_angles(u: OrientedPlane | np.ndarray, w: OrientedPlane | np.ndarray) -> np.ndarray:
    """Principal angles between two subspaces given by orthonormal frames."""
    fu = u.frame if isinstance(u, OrientedPlane) else np.asarray(u, dtype=float)
    fw = w.frame if isinstance(w, OrientedPlane) else np.asarray(w, dtype=float)
    sv = np.linalg.svd(fu.T @ fw, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


def max_principal_angle(u, w) -> float:
    return float(np.max(principal_angles(u, w)))


def orientation_sign(u: OrientedPlane, w: OrientedPlane) -> int:
    """+1 when two frames of the same plane orient it the same way."""
    det = float(np.linalg.det(u.frame.T @ w.frame))
    if abs(det) < 1e-8:
        raise InvalidInput("frames do not span the same plane")
    return 1 if det > 0 else -1
