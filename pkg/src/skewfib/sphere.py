"""Central projection between a fibered R^n and the unit sphere S^n.

R^n sits inside R^(n+1) as the tangent hyperplane at the north pole
(last coordinate 1); rays through the center identify it with the open
upper hemisphere.  Fibers of a chart correspond to great k-spheres, and
a chart on R^(2k+1) extends to a great-sphere fibration of all of
S^(2k+1) exactly when B(.)t is surjective for every nonzero t.  For
great circles the equatorial extension is classified by matrices that
are invariant on planes: B^2(u) in span{u, B(u)} for every u, i.e. all
eigenvalues a +- bi with a single (a, b) pair up to the sign of b.

Vectors in R^(n+1) keep the ambient order (fiber parameters first, then
the chart plane) and append the projective coordinate last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import report as rp
from .bilinear import BilinearMap, verify_nonsingular
from .dims import admissible_sphere
from .errors import DimensionMismatch, EquatorPoint, InvalidInput, RealEigenvalue
from .fibration import Chart, fiber_plane, fiber_solve
from .grassmann import AffinePlane, GreatSphere, embed_affine
from .numeric import SampleStream, Tolerance, orthonormalize

EQUATOR_EPS = 1e-14


def central_project(p: np.ndarray) -> np.ndarray:
    """Sphere point to tangent hyperplane: (x_1..x_n)/x_(n+1).

    Defined on either open hemisphere (antipodal points land together).
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise InvalidInput("need a vector with at least two coordinates")
    if abs(p[-1]) <= EQUATOR_EPS:
        raise EquatorPoint(f"last coordinate {p[-1]:.3e} is on the equator")
    return p[:-1] / p[-1]


def inverse_project(x: np.ndarray) -> np.ndarray:
    """Tangent-hyperplane point to the upper hemisphere: (x, 1)/|(x, 1)|."""
    x = np.asarray(x, dtype=float)
    v = np.append(x, 1.0)
    return v / np.linalg.norm(v)


def great_sphere_of(p: AffinePlane, tol: Tolerance | None = None) -> GreatSphere:
    """The great k-sphere cut out by the linearization of an affine plane.

    Upper-hemisphere points of the result centrally project back onto
    the plane.
    """
    return GreatSphere(embed_affine(p, tol).frame)


def completion_check(
    c: Chart,
    samples: int = 1024,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> rp.VerificationReport:
    """Surjectivity of y -> B(y)t for every unit t, on charts with n = 2k+1.

    Passing means the chart's fibration of R^(2k+1) completes to a great
    k-sphere fibration of S^(2k+1).  For linear and affine charts the map
    is y -> (sum_j t_j C_j) y and the check runs the exact pencil tests
    where available; for smooth charts the Jacobian of y -> B(y)t is
    sampled over (y, t) as evidence.
    """
    tol = tol or Tolerance.default()
    stream = stream or SampleStream()
    if c.n != 2 * c.k + 1:
        raise DimensionMismatch(f"need n = 2k+1, got n={c.n} k={c.k}")
    if c.is_linear:
        sub = verify_nonsingular(BilinearMap(c.q, c.k, c.C), samples, stream, tol)
        return rp.VerificationReport(
            "completion", sub.verdict, sub.margin, sub.witnesses, sub.sampling, sub.details
        )
    ys = stream.ball_points(samples, c.q, 10.0)
    ts = stream.unit_vectors(max(16, samples // 16), c.k)
    margin = np.inf
    sampling = {"seed": stream.seed, "mode": stream.mode, "count": samples, "radius": 10.0}
    for y in ys:
        jac = np.einsum("ijl,sj->sil", c.dB(y), ts)
        sv = np.linalg.svd(jac, compute_uv=False)
        smin, smax = sv[:, -1], sv[:, 0]
        i = int(np.argmin(smin))
        margin = min(margin, float(smin[i]))
        if smin[i] <= tol.rel * smax[i] + tol.abs:
            witness = {"y": y.tolist(), "t": ts[i].tolist(), "sigma_min": float(smin[i])}
            return rp.VerificationReport(
                "completion", rp.FAIL, float(smin[i]), (witness,), sampling, {"exact": False}
            )
    return rp.VerificationReport("completion", rp.EVIDENCE, float(margin), (), sampling, {"exact": False})


def completion_report(
    c: Chart,
    samples: int = 1024,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> rp.VerificationReport:
    """Completion check gated on the sphere fiber-dimension constraint.

    Great k-sphere fibrations of S^n exist only for k in {0, 1, 3, 7}
    with the matching parity of n; outside that list no completion
    exists and the check is not attempted.
    """
    if not admissible_sphere(c.k, c.n):
        witness = {"k": c.k, "n": c.n, "reason": "no sphere fibration exists"}
        return rp.VerificationReport(
            "completion", rp.FAIL, 0.0, (witness,), None, {"admissible": False}
        )
    return completion_check(c, samples, stream, tol)


# ---------------------------------------------------------------------------
# invariant-on-planes classification


@dataclass(frozen=True)
class PlaneInvariantReport:
    """Outcome of the invariant-on-planes test for a 2m x 2m matrix.

    When is_invariant, the matrix has the single eigenvalue pair a +- bi
    (b != 0) and (M - aI)^2 + b^2 I vanishes; max_residual is the largest
    sampled component of M^2 u orthogonal to span{u, Mu}.
    """

    is_invariant: bool
    a: float
    b: float
    max_residual: float

    def to_dict(self) -> dict:
        return {
            "is_invariant": self.is_invariant,
            "a": self.a,
            "b": self.b,
            "max_residual": self.max_residual,
        }


def plane_residual(m: np.ndarray, u: np.ndarray) -> float:
    """Norm of the component of M^2 u orthogonal to span{u, Mu}."""
    m = np.asarray(m, dtype=float)
    u = np.asarray(u, dtype=float)
    basis = orthonormalize(np.column_stack([u, m @ u]))
    w = m @ (m @ u)
    return float(np.linalg.norm(w - basis @ (basis.T @ w)))


def invariant_on_planes(
    m: np.ndarray,
    samples: int = 1000,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> PlaneInvariantReport:
    """Test whether M^2 u lies in span{u, Mu} for every u.

    Exactly the matrices with a single eigenvalue pair a +- bi and
    (M - aI)^2 + b^2 I = 0; such matrices extend their line fibration
    over the equator of the sphere.  Requires no real eigenvalues.  The
    sign of b is read off the (2,1) entry of M - aI when that entry is
    decisively nonzero; otherwise b is reported positive.
    """
    tol = tol or Tolerance.default()
    stream = stream or SampleStream()
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise InvalidInput(f"need an even square matrix, got shape {m.shape}")
    d = m.shape[0]
    eig = np.linalg.eigvals(m)
    real = np.abs(eig.imag) <= tol.rel * (1.0 + np.abs(eig))
    if np.any(real):
        raise RealEigenvalue(f"real eigenvalue {float(eig.real[real][0]):.6g}")

    scale = 1.0 + float(np.linalg.norm(m, 2))
    a = float(np.trace(m)) / d
    b = float(np.median(np.abs(eig.imag)))
    # aI does not touch the (2,1) entry, so the sign probe reads m directly.
    off = float(m[1, 0])
    if abs(off) > 1e-6 * scale:
        b = math.copysign(b, off)

    spectrum_ok = bool(
        np.all(np.abs(eig.real - a) <= tol.rel * scale)
        and np.all(np.abs(np.abs(eig.imag) - abs(b)) <= tol.rel * scale)
    )
    poly = (m - a * np.eye(d)) @ (m - a * np.eye(d)) + b * b * np.eye(d)
    poly_ok = float(np.linalg.norm(poly, 2)) <= tol.rel * scale * scale
    us = stream.unit_vectors(samples, d)
    max_residual = max(plane_residual(m, u) for u in us)
    return PlaneInvariantReport(spectrum_ok and poly_ok, a, b, max_residual)


def _invariant_data(m: np.ndarray, tol: Tolerance) -> tuple[float, float]:
    rep = invariant_on_planes(m, samples=64, stream=SampleStream(0), tol=tol)
    if not rep.is_invariant:
        raise InvalidInput("matrix is not invariant on planes")
    return rep.a, rep.b


def sphere_fiber_direction(
    m: np.ndarray, z: np.ndarray, z_t: float, tol: Tolerance | None = None
) -> np.ndarray:
    """Unnormalized direction of the great-circle fiber through (z_t, z).

    Returns the (2m+2)-vector (s, (z_t (a^2+b^2) I + M) z, 0) with
    s = (1 + z_t a)^2 + z_t^2 b^2, cross-checked against the
    matrix-inverse form (1, M (I + z_t M)^{-1} z, 0) scaled by s; the
    two agree to 1e-9 relative whenever M is invariant on planes.
    """
    tol = tol or Tolerance.default()
    m = np.asarray(m, dtype=float)
    z = np.asarray(z, dtype=float)
    a, b = _invariant_data(m, tol)
    s = (1.0 + z_t * a) ** 2 + (z_t * b) ** 2
    block = np.concatenate([[s], (z_t * (a * a + b * b) * np.eye(len(z)) + m) @ z, [0.0]])
    w = np.linalg.solve(np.eye(len(z)) + z_t * m, z)
    inverse_form = np.concatenate([[1.0], m @ w, [0.0]])
    err = float(np.linalg.norm(block - s * inverse_form))
    if err > 1e-9 * (1.0 + float(np.linalg.norm(block))):
        raise InvalidInput(f"direction forms disagree by {err:.3e}; matrix is not invariant")
    return block


def assemble_great_circles(m: np.ndarray, tol: Tolerance | None = None):
    """Assignment of a great circle of S^(2m+1) to every sphere point.

    Points off the closed equator project to the chart of the line
    fibration with B(y) = My and take their fiber's great circle.
    Equator points still covered by a fiber closure (nonzero parameter
    coordinate) use the limiting chart point M^{-1}(p_E / p_t).  Points
    of the core sphere S (parameter and projective coordinates both
    zero) take span{(0, u, 0), (0, Mu, 0)}.  Requires an
    invariant-on-planes matrix; returns the assignment as a callable.
    """
    tol = tol or Tolerance.default()
    m = np.asarray(m, dtype=float)
    _invariant_data(m, tol)
    d = m.shape[0]
    chart = Chart(1, d, "linear", C=(m,))

    def assign(p: np.ndarray) -> GreatSphere:
        p = np.asarray(p, dtype=float)
        if p.shape != (d + 2,):
            raise InvalidInput(f"sphere point shape {p.shape} != ({d + 2},)")
        if abs(float(np.linalg.norm(p)) - 1.0) > 1e-12:
            raise InvalidInput("sphere points must be unit vectors")
        p_t, p_e, p_proj = p[0], p[1:-1], p[-1]
        if abs(p_proj) > EQUATOR_EPS:
            y = fiber_solve(chart, p[:-1] / p_proj, tol)
            return great_sphere_of(fiber_plane(chart, y, tol), tol)
        if abs(p_t) > EQUATOR_EPS:
            y = np.linalg.solve(m, p_e / p_t)
            return great_sphere_of(fiber_plane(chart, y, tol), tol)
        cols = np.zeros((d + 2, 2))
        cols[1:-1, 0] = p_e
        cols[1:-1, 1] = m @ p_e
        return GreatSphere(orthonormalize(cols, tol))

    return assign


def equator_restriction(
    m: np.ndarray, u: np.ndarray, tol: Tolerance | None = None
) -> GreatSphere:
    """Great circle of the core sphere S^(2m-1) through u: span{u, Mu}.

    For any invariant-on-planes M this is the plane span{u, Ju}, so the
    equatorial restriction is always the standard Hopf fibration; the
    orientation follows the sign of b.
    """
    tol = tol or Tolerance.default()
    m = np.asarray(m, dtype=float)
    _invariant_data(m, tol)
    u = np.asarray(u, dtype=float)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-10:
        raise InvalidInput("u must be a unit vector")
    return GreatSphere(orthonormalize(np.column_stack([u, m @ u]), tol))
