"""Charts for skew fibrations of R^n = R^k x R^q.

A chart is the data of a map B from the chart plane R^q to Hom(R^k, R^q);
the fiber through a chart point y is the graph {(t, B(y) t + y)}.  Linear
charts store B as k matrices C_j with B(y) t = sum_j t_j C_j y, affine
charts add a constant offset, and smooth charts evaluate a closed form.

The fibration is by pairwise skew planes exactly when the stacked
difference [B(x) - B(y) | x - y] has trivial kernel for all x != y, and
is nondegenerate when the derivative of y -> [B(y) | y] is a nonsingular
bilinear map.  For line fibrations (k = 1) nondegeneracy is exactly
"dB_y has no real eigenvalues", which is tested exactly.

Coordinates: fiber parameters first, chart plane last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import report as rp
from .bilinear import BilinearMap, J2, from_algebra, verify_nonsingular
from .errors import (
    BlendFailure,
    InvalidInput,
    NoConvergence,
    SingularLastColumn,
    SingularSystem,
)
from .grassmann import AffinePlane, OrientedPlane, max_principal_angle, plane_from_columns
from .numeric import SampleStream, Tolerance, eigenvalues, jacobian, spherical_distance

LINEAR = "linear"
AFFINE = "affine"
BUILTIN = "builtin"

CHART_SCHEMA = "skewfib-chart-v1"


@dataclass(frozen=True, eq=False)
class Chart:
    k: int
    q: int
    kind: str
    C: tuple | None = None
    B0: np.ndarray | None = None
    name: str | None = None
    params: dict | None = None
    domain_radius: float = math.inf
    verified_margin: float | None = None
    b_func: object = field(default=None, repr=False)
    db_func: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.k < 1 or self.q < 1:
            raise InvalidInput(f"need k >= 1 and q >= 1, got k={self.k} q={self.q}")
        if self.kind not in (LINEAR, AFFINE, BUILTIN):
            raise InvalidInput(f"unknown chart kind {self.kind!r}")
        if self.kind in (LINEAR, AFFINE):
            if self.C is None or len(self.C) != self.k:
                raise InvalidInput(f"linear chart needs {self.k} matrices")
            mats = tuple(np.asarray(m, dtype=float) for m in self.C)
            for m in mats:
                if m.shape != (self.q, self.q):
                    raise InvalidInput(f"chart matrix shape {m.shape} != ({self.q}, {self.q})")
            object.__setattr__(self, "C", mats)
        if self.kind == AFFINE:
            b0 = np.asarray(self.B0, dtype=float)
            if b0.shape != (self.q, self.k):
                raise InvalidInput(f"offset shape {b0.shape} != ({self.q}, {self.k})")
            object.__setattr__(self, "B0", b0)
        if self.kind == BUILTIN and self.b_func is None:
            raise InvalidInput("builtin chart needs an evaluation function")

    @property
    def n(self) -> int:
        return self.k + self.q

    @property
    def is_linear(self) -> bool:
        """Linear or affine: B depends (affinely) linearly on y."""
        return self.kind in (LINEAR, AFFINE)

    @property
    def status(self) -> str:
        return "candidate" if self.verified_margin is None else "verified"

    def mark_verified(self, margin: float) -> "Chart":
        return replace(self, verified_margin=float(margin))

    def with_offset(self, b0: np.ndarray) -> "Chart":
        """Affine chart with the same linear part and the given offset."""
        if not self.is_linear:
            raise InvalidInput("offsets only apply to linear charts")
        return Chart(self.k, self.q, AFFINE, C=self.C, B0=b0, name=self.name, params=self.params)

    def B(self, y: np.ndarray) -> np.ndarray:
        """The q x k matrix B(y)."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.q,):
            raise InvalidInput(f"chart point shape {y.shape} != ({self.q},)")
        if self.kind == BUILTIN:
            return np.asarray(self.b_func(y), dtype=float).reshape(self.q, self.k)
        out = np.column_stack([c @ y for c in self.C])
        if self.kind == AFFINE:
            out = out + self.B0
        return out

    def A(self, y: np.ndarray) -> np.ndarray:
        """The q x (k+1) matrix [B(y) | y]."""
        return np.column_stack([self.B(y), np.asarray(y, dtype=float)])

    def dB(self, y: np.ndarray) -> np.ndarray:
        """Derivative of B at y as a (q, k, q) tensor T[i, j, l] = dB_ij/dy_l."""
        if self.is_linear:
            return np.stack(self.C, axis=0).transpose(1, 0, 2)
        if self.db_func is not None:
            return np.asarray(self.db_func(y), dtype=float).reshape(self.q, self.k, self.q)
        flat = jacobian(lambda z: self.B(z).ravel(), np.asarray(y, dtype=float))
        return flat.reshape(self.q, self.k, self.q)

    def dB_mats(self, y: np.ndarray) -> list[np.ndarray]:
        """dB at y as k matrices N_j with N_j xi = dB_y[xi] e_j."""
        t = self.dB(y)
        return [t[:, j, :] for j in range(self.k)]


def from_bilinear(a: BilinearMap, tol: Tolerance | None = None) -> Chart:
    """Linear chart from a nonsingular bilinear map.

    Divides by the last matrix slot so the chart-plane column becomes the
    identity: C_j = inv(M_kp1) M_j for j <= k.  The caller is expected to
    have verified nonsingularity; only invertibility of the last slot is
    checked here.
    """
    tol = tol or Tolerance.default()
    if a.kp1 < 2:
        raise InvalidInput("need kp1 >= 2 to form a chart")
    last = a.mats[-1]
    sv = np.linalg.svd(last, compute_uv=False)
    if sv[-1] <= tol.threshold(float(sv[0])):
        raise SingularLastColumn(f"last matrix has sigma_min={sv[-1]:.3e}")
    cs = tuple(np.linalg.solve(last, m) for m in a.mats[:-1])
    return Chart(a.kp1 - 1, a.q, LINEAR, C=cs)


def block_rotation(m: int) -> np.ndarray:
    """Block-diagonal 2m x 2m complex structure (m copies of J2)."""
    return np.kron(np.eye(m), J2)


def _quad_germ_chart(eps: float) -> Chart:
    eps = float(eps)

    def b(y):
        return (J2 @ y + eps * np.array([y[0] ** 2, y[0] * y[1]])).reshape(2, 1)

    def db(y):
        return (J2 + eps * np.array([[2 * y[0], 0.0], [y[1], y[0]]])).reshape(2, 1, 2)

    return Chart(
        1, 2, BUILTIN, name="quad_germ", params={"eps": eps},
        domain_radius=1.0, b_func=b, db_func=db,
    )


def builtin_chart(name: str, **params) -> Chart:
    """Named chart families.

    hopf3, hopf7, hopf15: line/3-plane/7-plane fibrations from complex,
    quaternion, and octonion multiplication.  hopf_line(m, a, b): the
    line fibration of R^(2m+1) with B(y) = (a I + b J) y.  gluck_yang(m):
    the line fibration whose orthogonal plane field fails the contact
    condition.  quad_germ(eps): a quadratically perturbed line germ on
    the unit disk, for extension demos.
    """
    if name == "hopf3":
        c = builtin_chart("hopf_line", m=1, a=0.0, b=1.0)
        return replace(c, name="hopf3", params={})
    if name == "hopf7":
        return replace(from_bilinear(from_algebra("quaternion", 4)), name="hopf7", params={})
    if name == "hopf15":
        return replace(from_bilinear(from_algebra("octonion", 8)), name="hopf15", params={})
    if name == "hopf_line":
        m, a, b = int(params["m"]), float(params["a"]), float(params["b"])
        if m < 1:
            raise InvalidInput(f"need m >= 1, got {m}")
        if b == 0.0:
            raise InvalidInput("need b != 0: a real multiple of the identity is degenerate")
        c1 = a * np.eye(2 * m) + b * block_rotation(m)
        return Chart(1, 2 * m, LINEAR, C=(c1,), name="hopf_line", params={"m": m, "a": a, "b": b})
    if name == "gluck_yang":
        from .contact import gluck_yang_matrix

        m = int(params["m"])
        return Chart(
            1, 2 * m, LINEAR, C=(gluck_yang_matrix(m),), name="gluck_yang", params={"m": m}
        )
    if name == "quad_germ":
        return _quad_germ_chart(params.get("eps", 0.05))
    if name == "germ_extension":
        base = params["base"]
        if isinstance(base, dict):
            base = chart_from_dict(base)
        return _make_extension(base, float(params["blend_r"]))
    raise InvalidInput(f"unknown builtin chart {name!r}")


def chart_to_dict(c: Chart) -> dict:
    out: dict = {"schema": CHART_SCHEMA, "k": c.k, "q": c.q, "kind": c.kind}
    if c.is_linear:
        out["C"] = [m.tolist() for m in c.C]
        if c.kind == AFFINE:
            out["B0"] = c.B0.tolist()
        if c.name:
            out["builtin"] = {"name": c.name, "params": c.params or {}}
        return out
    if c.name == "germ_extension":
        base = c.params["base"]
        base_dict = base if isinstance(base, dict) else chart_to_dict(base)
        out["builtin"] = {"name": c.name, "params": {"blend_r": c.params["blend_r"], "base": base_dict}}
        return out
    if c.name:
        out["builtin"] = {"name": c.name, "params": c.params or {}}
        return out
    raise InvalidInput("cannot serialize an anonymous smooth chart")


def chart_from_dict(data: dict) -> Chart:
    try:
        kind = data["kind"]
        k, q = int(data["k"]), int(data["q"])
    except KeyError as exc:
        raise InvalidInput(f"chart data missing key {exc}") from exc
    meta = data.get("builtin") or {}
    if kind in (LINEAR, AFFINE):
        c = Chart(
            k, q, kind, C=tuple(data["C"]),
            B0=data.get("B0") if kind == AFFINE else None,
            name=meta.get("name"), params=meta.get("params"),
        )
        return c
    if kind == BUILTIN:
        if "name" not in meta:
            raise InvalidInput("builtin chart data needs builtin.name")
        c = builtin_chart(meta["name"], **(meta.get("params") or {}))
        if (c.k, c.q) != (k, q):
            raise InvalidInput(f"builtin {meta['name']} has (k, q) = ({c.k}, {c.q}), data says ({k}, {q})")
        return c
    raise InvalidInput(f"unknown chart kind {kind!r}")


# ---------------------------------------------------------------------------
# fibers


def _solve_residual(c: Chart, x: np.ndarray, y: np.ndarray) -> float:
    t1, t2 = x[: c.k], x[c.k :]
    return float(np.linalg.norm(y + c.B(y) @ t1 - t2))


def fiber_solve(c: Chart, x: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Chart point y whose fiber passes through x = (t1, t2).

    Solves y + B(y) t1 = t2: directly for linear and affine charts, by a
    damped Newton iteration (at most 100 steps, started at t2) otherwise.
    The result satisfies |y + B(y) t1 - t2| <= 1e-10 (1 + |x|).
    """
    tol = tol or Tolerance.default()
    x = np.asarray(x, dtype=float)
    if x.shape != (c.n,):
        raise InvalidInput(f"point shape {x.shape} != ({c.n},)")
    t1, t2 = x[: c.k], x[c.k :]
    budget = 1e-10 * (1.0 + float(np.linalg.norm(x)))

    if c.is_linear:
        mat = np.eye(c.q) + sum(t1[j] * c.C[j] for j in range(c.k))
        rhs = t2 - (c.B0 @ t1 if c.kind == AFFINE else 0.0)
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[-1] <= tol.threshold(float(sv[0])):
            raise SingularSystem(
                f"chart system singular at t1={t1.tolist()}: sigma_min={sv[-1]:.3e}"
            )
        y = np.linalg.solve(mat, rhs)
        # One refinement step guards against loss of accuracy at large |x|.
        y = y + np.linalg.solve(mat, rhs - mat @ y)
        if _solve_residual(c, x, y) > budget:
            raise NoConvergence(f"linear solve residual above {budget:.3e}")
        return y

    y = t2.copy()
    res = _solve_residual(c, x, y)
    for _ in range(100):
        if res <= budget:
            return y
        r = y + c.B(y) @ t1 - t2
        jac = np.eye(c.q) + np.einsum("ijl,j->il", c.dB(y), t1)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] <= tol.threshold(float(sv[0])):
            raise SingularSystem(f"Newton Jacobian singular: sigma_min={sv[-1]:.3e}")
        step = -np.linalg.solve(jac, r)
        lam = 1.0
        while lam > 1e-6:
            cand = y + lam * step
            cand_res = _solve_residual(c, x, cand)
            if cand_res < res:
                y, res = cand, cand_res
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"damping stalled at residual {res:.3e}")
    if res <= budget:
        return y
    raise NoConvergence(f"no convergence in 100 iterations, residual {res:.3e}")


def fiber_plane(c: Chart, y: np.ndarray, tol: Tolerance | None = None) -> AffinePlane:
    """The fiber through chart point y as an affine plane.

    Direction is the span of (e_j, B(y) e_j), oriented by parameter
    order; the base point is (0, y) projected off the direction.
    """
    y = np.asarray(y, dtype=float)
    by = c.B(y)
    cols = np.vstack([np.eye(c.k), by])
    direction = plane_from_columns(cols, tol)
    p = np.concatenate([np.zeros(c.k), y])
    base = p - direction.frame @ (direction.frame.T @ p)
    return AffinePlane(direction, base)


def fiber_distance(c: Chart, x: np.ndarray, tol: Tolerance | None = None) -> float:
    """Distance from the origin to the fiber through x."""
    y = fiber_solve(c, x, tol)
    return float(np.linalg.norm(fiber_plane(c, y, tol).base))


# ---------------------------------------------------------------------------
# verification


def verify_skew(
    c: Chart,
    radius: float = 10.0,
    samples: int = 1024,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> rp.VerificationReport:
    """Kernel test for pairwise skewness over sampled chart-point pairs.

    Fibers through x != y are skew exactly when [B(x) - B(y) | x - y]
    has trivial kernel; margin is the minimum over sampled pairs of
    sigma_min of that matrix divided by |x - y|.
    """
    tol = tol or Tolerance.default()
    stream = stream or SampleStream()
    if samples < 2:
        raise InvalidInput(f"need samples >= 2, got {samples}")
    xs, ys = stream.pairs_in_ball(samples, c.q, radius)
    norms = np.linalg.norm(xs - ys, axis=1)
    keep = norms > 1e-12 * max(radius, 1.0)
    xs, ys, norms = xs[keep], ys[keep], norms[keep]
    if xs.shape[0] == 0:
        raise InvalidInput("all sampled pairs were coincident; increase samples or radius")

    if c.is_linear:
        diff = xs - ys
        stacks = np.empty((diff.shape[0], c.q, c.k + 1))
        for j in range(c.k):
            stacks[:, :, j] = diff @ c.C[j].T
        stacks[:, :, c.k] = diff
    else:
        stacks = np.stack(
            [np.column_stack([c.B(x) - c.B(y), x - y]) for x, y in zip(xs, ys)]
        )
    sv = np.linalg.svd(stacks, compute_uv=False)
    smin, smax = sv[:, -1], sv[:, 0]
    margins = smin / norms
    singular = smin <= tol.rel * smax + tol.abs
    order = np.argsort(margins)
    sampling = {"seed": stream.seed, "mode": stream.mode, "count": samples, "radius": radius}
    details = {"pairs_tested": int(xs.shape[0])}
    if np.any(singular):
        witnesses = tuple(
            {"x": xs[i].tolist(), "y": ys[i].tolist(), "sigma_min": float(smin[i])}
            for i in order[:3]
            if singular[i]
        )
        return rp.VerificationReport(
            "skew", rp.FAIL, float(margins[order[0]]), witnesses, sampling, details
        )
    return rp.VerificationReport(
        "skew", rp.EVIDENCE, float(margins[order[0]]), (), sampling, details
    )


def _real_eig_mask(eig: np.ndarray, tol: Tolerance) -> np.ndarray:
    return np.abs(eig.imag) <= tol.rel * (1.0 + np.abs(eig))


def verify_nondegenerate(
    c: Chart,
    radius: float = 10.0,
    samples: int = 1024,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
    t_samples: int = 64,
) -> rp.VerificationReport:
    """Nondegeneracy: the derivative bilinear map must be nonsingular.

    For k = 1 the condition is that dB_y has no real eigenvalues; this is
    exact for linear charts (dB is constant) and sampled over chart
    points otherwise, with margin the least |Im eigenvalue|.  For k >= 2
    the sampled pencil test runs on (dB_y, identity).
    """
    tol = tol or Tolerance.default()
    stream = stream or SampleStream()
    sampling = {"seed": stream.seed, "mode": stream.mode, "count": samples, "radius": radius}

    if c.is_linear and c.k == 1:
        eig = eigenvalues(c.C[0])
        margin = float(np.min(np.abs(eig.imag)))
        details = {"exact": True, "eigenvalues": [complex(v) for v in eig]}
        if np.any(_real_eig_mask(eig, tol)):
            lam = float(eig.real[_real_eig_mask(eig, tol)][0])
            witness = {"y": [0.0] * c.q, "eigenvalue": lam}
            return rp.VerificationReport("nondegenerate", rp.FAIL, margin, (witness,), None, details)
        return rp.VerificationReport("nondegenerate", rp.PASS, margin, (), None, details)

    if c.is_linear:
        bm = BilinearMap(c.q, c.k + 1, (*c.C, np.eye(c.q)))
        sub = verify_nonsingular(bm, samples, stream, tol)
        return rp.VerificationReport(
            "nondegenerate", sub.verdict, sub.margin, sub.witnesses, sampling, sub.details
        )

    pts = stream.ball_points(samples, c.q, radius)
    if c.k == 1:
        mats = np.stack([c.dB(y)[:, 0, :] for y in pts])
        eig = np.linalg.eigvals(mats)
        per_point = np.min(np.abs(eig.imag), axis=1)
        margin = float(np.min(per_point))
        worst = int(np.argmin(per_point))
        details = {"exact": False, "worst_point": pts[worst].tolist()}
        real_any = np.abs(eig.imag) <= tol.rel * (1.0 + np.abs(eig))
        bad_pts = np.any(real_any, axis=1)
        if np.any(bad_pts):
            i = int(np.argmax(bad_pts))
            lam = float(eig[i].real[real_any[i]][0])
            witness = {"y": pts[i].tolist(), "eigenvalue": lam}
            return rp.VerificationReport(
                "nondegenerate", rp.FAIL, margin, (witness,), sampling, details
            )
        return rp.VerificationReport("nondegenerate", rp.EVIDENCE, margin, (), sampling, details)

    ts = stream.unit_vectors(t_samples, c.k + 1)
    margin = math.inf
    worst_point = None
    for y in pts:
        mats = np.stack(c.dB_mats(y) + [np.eye(c.q)])
        combos = np.einsum("sj,jab->sab", ts, mats)
        sv = np.linalg.svd(combos, compute_uv=False)
        smin, smax = sv[:, -1], sv[:, 0]
        m = float(np.min(smin))
        if m < margin:
            margin, worst_point = m, y
        bad = smin <= tol.rel * smax + tol.abs
        if np.any(bad):
            i = int(np.argmin(np.where(bad, smin, np.inf)))
            witness = {"y": y.tolist(), "t": ts[i].tolist(), "sigma_min": float(smin[i])}
            return rp.VerificationReport(
                "nondegenerate", rp.FAIL, float(smin[i]), (witness,), sampling,
                {"exact": False},
            )
    details = {"exact": False, "worst_point": None if worst_point is None else worst_point.tolist()}
    return rp.VerificationReport("nondegenerate", rp.EVIDENCE, margin, (), sampling, details)


def verify_proper(
    c: Chart,
    radii: tuple = (1e2, 1e3, 1e4),
    rays: int = 16,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> rp.VerificationReport:
    """Sampled properness probe: along chart-plane rays the distance from
    the origin to the fiber must grow, with the last radius at least ten
    times the first."""
    stream = stream or SampleStream()
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidInput("radii must be increasing with at least two entries")
    dirs = stream.unit_vectors(rays, c.q)
    margin = math.inf
    sampling = {"seed": stream.seed, "mode": stream.mode, "count": rays, "radius": radii[-1]}
    for w in dirs:
        ds = [fiber_distance(c, np.concatenate([np.zeros(c.k), r * w]), tol) for r in radii]
        growth = ds[-1] / max(ds[0], 1e-300)
        margin = min(margin, growth)
        if any(b <= a for a, b in zip(ds, ds[1:])) or growth < 10.0:
            witness = {"ray": w.tolist(), "distances": ds}
            return rp.VerificationReport("proper", rp.FAIL, growth, (witness,), sampling, {})
    return rp.VerificationReport("proper", rp.EVIDENCE, float(margin), (), sampling, {})


# ---------------------------------------------------------------------------
# asymptotics


@dataclass(frozen=True)
class ConeProbe:
    """Probe along base + t * ell with every point inside the cone
    {y : <y, ell> >= N, angle(y, ell) <= delta}."""

    ell: np.ndarray
    t_values: tuple
    N: float = 1.0
    delta: float = 0.5
    base: np.ndarray | None = None

    def __post_init__(self):
        ell = np.asarray(self.ell, dtype=float)
        object.__setattr__(self, "ell", ell)
        if abs(float(np.linalg.norm(ell)) - 1.0) > 1e-10:
            raise InvalidInput("ell must be a unit vector")
        if not (0.0 < self.delta < math.pi / 2):
            raise InvalidInput(f"delta must lie in (0, pi/2), got {self.delta}")
        ts = tuple(float(t) for t in self.t_values)
        if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
            raise InvalidInput("t_values must be nonempty and increasing")
        object.__setattr__(self, "t_values", ts)
        base = np.zeros_like(ell) if self.base is None else np.asarray(self.base, dtype=float)
        if base.shape != ell.shape:
            raise InvalidInput("base must match ell in shape")
        object.__setattr__(self, "base", base)
        for t in ts:
            y = base + t * ell
            if float(y @ ell) < self.N:
                raise InvalidInput(f"probe point at t={t} leaves the cone: <y, ell> < N")
            if spherical_distance(y / np.linalg.norm(y), ell) > self.delta:
                raise InvalidInput(f"probe point at t={t} leaves the cone: angle > delta")

    def points(self) -> np.ndarray:
        return np.stack([self.base + t * self.ell for t in self.t_values])


def fiber_containing_direction(c: Chart, ell: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Chart point whose fiber has ell among its directions.

    Solves B(y) ell_t = ell_y; requires a nonzero parameter part.
    """
    tol = tol or Tolerance.default()
    ell = np.asarray(ell, dtype=float)
    lt, ly = ell[: c.k], ell[c.k :]
    if float(np.linalg.norm(lt)) <= 1e-12:
        raise InvalidInput("direction lies in the chart plane; no fiber contains it")
    if c.is_linear:
        mat = sum(lt[j] * c.C[j] for j in range(c.k))
        rhs = ly - (c.B0 @ lt if c.kind == AFFINE else 0.0)
        y, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        if float(np.linalg.norm(mat @ y - rhs)) > 1e-8 * (1.0 + float(np.linalg.norm(rhs))):
            raise InvalidInput("no fiber contains the given direction")
        return y
    y = np.zeros(c.q)
    for _ in range(100):
        r = c.B(y) @ lt - ly
        if float(np.linalg.norm(r)) <= 1e-12 * (1.0 + float(np.linalg.norm(ly))):
            return y
        jac = np.einsum("ijl,j->il", c.dB(y), lt)
        y = y - np.linalg.solve(jac, r)
    raise NoConvergence("could not locate a fiber with the given direction")


def continuity_probe(
    c: Chart,
    ell: np.ndarray,
    probe: ConeProbe,
    reference: OrientedPlane | None = None,
    tol: Tolerance | None = None,
) -> list[float]:
    """Largest principal angle between the fiber through each probe point
    and the fiber containing the direction ell.

    Fibers through points diverging inside a cone around ell converge to
    the fiber containing ell; the returned angles quantify the rate.
    """
    tol = tol or Tolerance.default()
    ell = np.asarray(ell, dtype=float)
    if ell.shape != (c.n,):
        raise InvalidInput(f"ell shape {ell.shape} != ({c.n},)")
    if reference is None:
        y_ref = fiber_containing_direction(c, ell, tol)
        reference = fiber_plane(c, y_ref, tol).direction
    angles = []
    for pt in probe.points():
        y = fiber_solve(c, pt, tol)
        d = fiber_plane(c, y, tol).direction
        angles.append(max_principal_angle(d, reference))
    return angles


def limiting_direction(
    c: Chart,
    u: np.ndarray,
    v: np.ndarray,
    t: float = 1e8,
    tol: Tolerance | None = None,
) -> np.ndarray:
    """Limit of the fiber direction along v + s u as s grows, for line charts.

    u must be a unit vector in the chart plane (zero parameter part) and v
    orthogonal to u.  Evaluated at s = t with one Richardson step, which
    cancels the order-1/s error of the plain evaluation.
    """
    if c.k != 1:
        raise InvalidInput("limiting directions are defined for line charts (k = 1)")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (c.n,) or v.shape != (c.n,):
        raise InvalidInput("u and v must be ambient vectors")
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-10:
        raise InvalidInput("u must be a unit vector")
    if float(np.abs(u[: c.k]).max()) > 1e-12:
        raise InvalidInput("u must lie in the chart plane (zero parameter part)")
    if abs(float(u @ v)) > 1e-10 * (1.0 + float(np.linalg.norm(v))):
        raise InvalidInput("v must be orthogonal to u")

    def direction(s: float) -> np.ndarray:
        y = fiber_solve(c, v + s * u, tol)
        d = np.concatenate([[1.0], c.B(y)[:, 0]])
        return d / np.linalg.norm(d)

    d1 = direction(t)
    d2 = direction(2.0 * t)
    limit = 2.0 * d2 - d1
    return limit / np.linalg.norm(limit)


# ---------------------------------------------------------------------------
# germs


def _bump(s: float) -> float:
    """Smooth transition: 1 on s <= 1/2, 0 on s >= 1."""
    if s <= 0.5:
        return 1.0
    if s >= 1.0:
        return 0.0
    tau = 2.0 * (s - 0.5)
    g1 = math.exp(-1.0 / (1.0 - tau))
    g0 = math.exp(-1.0 / tau)
    return g1 / (g1 + g0)


def _make_extension(local: Chart, blend_r: float) -> Chart:
    b0 = local.B(np.zeros(local.q))
    t0 = local.dB(np.zeros(local.q))

    def b(y):
        s = float(np.linalg.norm(y)) / blend_r
        if s <= 0.5:
            return local.B(y)
        lin = b0 + np.einsum("ijl,l->ij", t0, y)
        if s >= 1.0:
            return lin
        w = _bump(s)
        return w * local.B(y) + (1.0 - w) * lin

    return Chart(
        local.k, local.q, BUILTIN, name="germ_extension",
        params={"blend_r": float(blend_r), "base": local},
        b_func=b,
    )


def extend_germ(
    local: Chart,
    blend_r: float = 0.5,
    samples: int = 2000,
    seed: int = 0,
    tol: Tolerance | None = None,
) -> Chart:
    """Extend a chart germ to all of R^q by blending into its linearization.

    Outside the blend zone the chart is the affine chart B(0) + dB_0 y,
    whose nondegeneracy is the germ's nondegeneracy at the origin and is
    checked first.  Inside radius blend_r/2 the germ is evaluated through
    the identical code path, so values agree bitwise.  The blend radius is
    halved (at most 20 times) until the blended chart passes the sampled
    nondegeneracy check on a ball of ten times the blend radius.
    """
    tol = tol or Tolerance.default()
    if local.is_linear:
        # Already globally defined and equal to its own linearization.
        return local
    if not (0.0 < blend_r <= local.domain_radius):
        raise InvalidInput(
            f"need 0 < blend_r <= domain radius {local.domain_radius}, got {blend_r}"
        )
    t0 = local.dB(np.zeros(local.q))
    if local.k == 1:
        eig = np.linalg.eigvals(t0[:, 0, :])
        if np.any(_real_eig_mask(eig, tol)):
            raise InvalidInput(
                "germ is degenerate at the origin: dB_0 has a real eigenvalue "
                f"{float(eig.real[_real_eig_mask(eig, tol)][0]):.6g}"
            )
    else:
        mats = [t0[:, j, :] for j in range(local.k)] + [np.eye(local.q)]
        sub = verify_nonsingular(
            BilinearMap(local.q, local.k + 1, tuple(mats)), 512, SampleStream(seed), tol
        )
        if not sub.ok:
            raise InvalidInput("germ is degenerate at the origin: derivative pencil is singular")

    r = float(blend_r)
    for attempt in range(21):
        ext = _make_extension(local, r)
        repn = verify_nondegenerate(
            ext, radius=10.0 * r, samples=samples, stream=SampleStream(seed + attempt), tol=tol
        )
        if repn.ok:
            return ext.mark_verified(repn.margin)
        r *= 0.5
    raise BlendFailure(f"no nondegenerate blend found down to radius {r:.3e}")


# ---------------------------------------------------------------------------
# sampling fibers


def sample_fibers(
    c: Chart,
    base_points: np.ndarray,
    t_range: tuple = (-1.0, 1.0),
    steps: int = 5,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample points of the fibers through the given chart points.

    Returns (fiber_ids, grid_indices, points): for each base point, a
    grid of steps**k parameter values over t_range per axis, with the
    ambient point (t, B(y) t + y) for each.
    """
    base_points = np.atleast_2d(np.asarray(base_points, dtype=float))
    if base_points.shape[1] != c.q:
        raise InvalidInput(f"base points must have {c.q} columns")
    if steps < 1:
        raise InvalidInput("need steps >= 1")
    lo, hi = float(t_range[0]), float(t_range[1])
    if hi <= lo:
        raise InvalidInput("t_range must be increasing")
    axis = np.linspace(lo, hi, steps)
    grids = np.meshgrid(*([axis] * c.k), indexing="ij")
    tgrid = np.stack([g.ravel() for g in grids], axis=1)
    idx = np.stack(
        [g.ravel() for g in np.meshgrid(*([np.arange(steps)] * c.k), indexing="ij")], axis=1
    )
    ids, indices, points = [], [], []
    for fid, y in enumerate(base_points):
        by = c.B(y)
        pts = np.hstack([tgrid, tgrid @ by.T + y])
        ids.append(np.full(tgrid.shape[0], fid))
        indices.append(idx)
        points.append(pts)
    return np.concatenate(ids), np.vstack(indices), np.vstack(points)
