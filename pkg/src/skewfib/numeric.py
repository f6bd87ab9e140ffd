"""Shared numerical primitives.

Vectors and matrices are plain float64 numpy arrays.  All randomized
routines draw from a SampleStream so that identical seeds reproduce
identical samples bit for bit, and so that the first N points of a larger
batch coincide with the N points of a smaller one (draws happen in fixed
chunks).  Singularity decisions use the relative-plus-absolute threshold
sigma_min <= rel * sigma_max + abs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, InvalidInput, RankDeficient

DEFAULT_REL = 1e-8
DEFAULT_ABS = 1e-12

# Draws are generated in chunks of this many points so that sample i depends
# only on i, never on the requested batch size.
_CHUNK = 256


@dataclass(frozen=True)
class Tolerance:
    rel: float = DEFAULT_REL
    abs: float = DEFAULT_ABS

    def __post_init__(self):
        # NaN fails both comparisons, so it is rejected here too
        if not (self.rel > 0.0 and self.abs > 0.0):
            raise InvalidInput(f"tolerances must be positive, got rel={self.rel} abs={self.abs}")

    @staticmethod
    def default() -> "Tolerance":
        """Default tolerances, overridable via SKEWFIB_TOL=REL[,ABS]."""
        raw = os.environ.get("SKEWFIB_TOL")
        if not raw:
            return Tolerance()
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        try:
            if len(parts) == 1:
                return Tolerance(rel=float(parts[0]))
            if len(parts) == 2:
                return Tolerance(rel=float(parts[0]), abs=float(parts[1]))
        except ValueError:
            pass
        raise InvalidInput(f"cannot parse SKEWFIB_TOL={raw!r}; expected REL or REL,ABS")

    def threshold(self, scale: float) -> float:
        """Singularity cutoff for a quantity whose natural scale is `scale`."""
        return self.rel * scale + self.abs


def _primes(count: int) -> list[int]:
    out, n = [], 2
    while len(out) < count:
        if all(n % p for p in out):
            out.append(n)
        n += 1
    return out


class SampleStream:
    """Deterministic point source for verification loops.

    mode "pseudo-random" draws from a seeded PCG64 generator; mode
    "low-discrepancy" uses an additive Kronecker lattice pushed onto the
    sphere through Box-Muller pairs.  Both modes are prefix-stable: the
    points of a batch of size N are the first N points of any larger batch.
    """

    MODES = ("pseudo-random", "low-discrepancy")

    def __init__(self, seed: int = 0, mode: str = "pseudo-random"):
        if mode not in self.MODES:
            raise InvalidInput(f"unknown sample mode {mode!r}; expected one of {self.MODES}")
        self.seed = int(seed)
        self.mode = mode
        self.counter = 0
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        if mode == "low-discrepancy":
            # Per-seed phase plus square-root-of-prime increments.
            self._phase = self._gen.random(64)
            self._alpha = np.sqrt(np.array(_primes(64), dtype=float)) % 1.0
            self._index = 0

    # Each chunk draws `dims` standard normals plus one uniform per point.
    def _chunk(self, dims: int) -> tuple[np.ndarray, np.ndarray]:
        if self.mode == "pseudo-random":
            g = self._gen.standard_normal((_CHUNK, dims))
            u = self._gen.random(_CHUNK)
            return g, u
        idx = np.arange(self._index + 1, self._index + _CHUNK + 1, dtype=float)
        self._index += _CHUNK
        ncols = 2 * ((dims + 1) // 2)
        lattice = (self._phase[: ncols + 1] + np.outer(idx, self._alpha[: ncols + 1])) % 1.0
        u1 = np.clip(lattice[:, 0:ncols:2], 1e-16, 1 - 1e-16)
        u2 = lattice[:, 1:ncols:2]
        radial = np.sqrt(-2.0 * np.log(u1))
        g = np.empty((_CHUNK, ncols))
        g[:, 0::2] = radial * np.cos(2 * np.pi * u2)
        g[:, 1::2] = radial * np.sin(2 * np.pi * u2)
        return g[:, :dims], lattice[:, ncols]

    def _points(self, count: int, dims: int) -> tuple[np.ndarray, np.ndarray]:
        if count < 0 or dims < 1:
            raise InvalidInput("need count >= 0 and dims >= 1")
        chunks = max(1, -(-count // _CHUNK)) if count else 0
        gs, us = [], []
        for _ in range(chunks):
            g, u = self._chunk(dims)
            gs.append(g)
            us.append(u)
        self.counter += count
        if not count:
            return np.empty((0, dims)), np.empty(0)
        return np.vstack(gs)[:count], np.concatenate(us)[:count]

    def unit_vectors(self, count: int, dims: int) -> np.ndarray:
        """count unit vectors on the sphere in R^dims, one per row."""
        g, _ = self._points(count, dims)
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return g / norms

    def ball_points(self, count: int, dims: int, radius: float) -> np.ndarray:
        """count points uniform in the ball of the given radius."""
        g, u = self._points(count, dims)
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return (g / norms) * (radius * u[:, None] ** (1.0 / dims))

    def pairs_in_ball(self, count: int, dims: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """count pairs (x, y) of ball points, drawn as consecutive samples."""
        pts = self.ball_points(2 * count, dims, radius)
        return pts[0::2], pts[1::2]


def sigma_min(m: np.ndarray) -> float:
    """Smallest singular value."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidInput("sigma_min expects a nonempty 2-d array")
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def sigma_max(m: np.ndarray) -> float:
    return float(np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)[0])


def orthonormalize(frame: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal frame with the same column span and orientation.

    The change of basis from the input columns to the output columns has
    positive determinant.  Raises RankDeficient when the columns are
    dependent at the absolute tolerance.
    """
    tol = tol or Tolerance.default()
    frame = np.asarray(frame, dtype=float)
    if frame.ndim != 2 or frame.shape[1] == 0:
        raise InvalidInput("orthonormalize expects an n x k frame with k >= 1")
    if frame.shape[0] < frame.shape[1]:
        raise RankDeficient(f"frame of shape {frame.shape} cannot have independent columns")
    smin = float(np.linalg.svd(frame, compute_uv=False)[-1])
    if smin <= tol.abs:
        raise RankDeficient(f"frame is rank deficient: sigma_min={smin:.3e} <= {tol.abs:.1e}")
    q, r = np.linalg.qr(frame)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def orthonormal_complement(frame: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span.

    Built by Gram-Schmidt over the standard basis in order, so for
    axis-aligned inputs the complement is the remaining axes with
    positive sign.
    """
    frame = np.asarray(frame, dtype=float)
    n, k = frame.shape
    if k >= n:
        return np.empty((n, 0))
    on = orthonormalize(frame, tol)
    cols = [on[:, j].copy() for j in range(k)]
    out = []
    for i in range(n):
        if len(out) == n - k:
            break
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for c in cols:
                v -= c * (c @ v)
        nv = float(np.linalg.norm(v))
        if nv > 1e-6:
            v /= nv
            cols.append(v)
            out.append(v)
    if len(out) != n - k:
        raise RankDeficient("failed to complete the frame to a basis")
    return np.column_stack(out)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """All eigenvalues with multiplicity, as a complex array.

    The matrix is split along connected components of its sparsity
    pattern first.  1x1 and 2x2 components are solved by the quadratic
    formula, so block-rotation matrices aI + b J report spectra a +- bi
    without the extra rounding of a general QR sweep.  Larger components
    fall back to LAPACK.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput("eigenvalues expects a square matrix")
    n = m.shape[0]
    linked = (m != 0.0) | (m.T != 0.0)
    seen = np.zeros(n, dtype=bool)
    out: list[complex] = []
    for start in range(n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = [start]
        while queue:
            for j in np.nonzero(linked[queue.pop()])[0]:
                if not seen[j]:
                    seen[j] = True
                    comp.append(j)
                    queue.append(j)
        comp.sort()
        if len(comp) == 1:
            out.append(complex(m[comp[0], comp[0]]))
        elif len(comp) == 2:
            i, j = comp
            half_tr = 0.5 * (m[i, i] + m[j, j])
            disc = (0.5 * (m[i, i] - m[j, j])) ** 2 + m[i, j] * m[j, i]
            # sqrt(b*b) rounds to exactly |b|, so pure rotation blocks
            # keep their imaginary parts exact
            root = float(np.sqrt(abs(disc)))
            if disc >= 0.0:
                out.extend((complex(half_tr - root), complex(half_tr + root)))
            else:
                out.extend((complex(half_tr, -root), complex(half_tr, root)))
        else:
            sub = m[np.ix_(comp, comp)]
            try:
                out.extend(np.linalg.eigvals(sub))
            except np.linalg.LinAlgError as exc:
                raise ConvergenceFailure(f"eigenvalue iteration failed: {exc}") from exc
    return np.asarray(out, dtype=complex)


def jacobian(f, y: np.ndarray, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of f at y.

    Step defaults to 1e-5 * (1 + |y|).  f maps a p-vector to an r-vector
    (or any fixed-shape array, which is flattened); the result is r x p.
    """
    y = np.asarray(y, dtype=float)
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(y)))
    cols = []
    for i in range(y.size):
        step = np.zeros_like(y)
        step[i] = h
        fp = np.asarray(f(y + step), dtype=float).ravel()
        fm = np.asarray(f(y - step), dtype=float).ravel()
        cols.append((fp - fm) / (2.0 * h))
    return np.column_stack(cols)


def spherical_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Great-circle distance between unit vectors."""
    c = float(np.clip(np.dot(u, v), -1.0, 1.0))
    return math.acos(c)
