"""Nonsingular bilinear maps R^q x R^(k+1) -> R^q.

A bilinear map is stored as kp1 = k+1 square matrices M_j acting on the
first slot: A(y, t) = sum_j t_j M_j y.  Nonsingularity means every
nonzero t gives an invertible combination sum_j t_j M_j.  Generators:
left multiplication in the complex numbers, quaternions, and octonions,
and anticommuting orthogonal families of every admissible size built by
the tensor-product recursion behind the Hurwitz-Radon bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import report as rp
from .dims import rho
from .errors import InvalidInput
from .numeric import SampleStream, Tolerance

# 2 x 2 generators: one complex structure and two anticommuting reflections.
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
_P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
_Q2 = np.array([[1.0, 0.0], [0.0, -1.0]])


@dataclass(frozen=True)
class BilinearMap:
    q: int
    kp1: int
    mats: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.mats)
        object.__setattr__(self, "mats", mats)
        if self.q < 1 or self.kp1 < 1:
            raise InvalidInput(f"need q >= 1 and kp1 >= 1, got q={self.q} kp1={self.kp1}")
        if len(mats) != self.kp1:
            raise InvalidInput(f"expected {self.kp1} matrices, got {len(mats)}")
        for m in mats:
            if m.shape != (self.q, self.q):
                raise InvalidInput(f"matrix shape {m.shape} != ({self.q}, {self.q})")

    def apply(self, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        return self.matrix_at(t) @ np.asarray(y, dtype=float)

    def matrix_at(self, t: np.ndarray) -> np.ndarray:
        """The combination sum_j t_j M_j."""
        t = np.asarray(t, dtype=float)
        if t.shape != (self.kp1,):
            raise InvalidInput(f"t shape {t.shape} != ({self.kp1},)")
        return np.einsum("j,jab->ab", t, np.stack(self.mats))

    def to_dict(self) -> dict:
        return {"q": self.q, "kp1": self.kp1, "mats": [m.tolist() for m in self.mats]}

    @staticmethod
    def from_dict(data: dict) -> "BilinearMap":
        try:
            return BilinearMap(int(data["q"]), int(data["kp1"]), tuple(data["mats"]))
        except KeyError as exc:
            raise InvalidInput(f"bilinear map data missing key {exc}") from exc


def _quat_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


def _quat_conj(x: np.ndarray) -> np.ndarray:
    return np.array([x[0], -x[1], -x[2], -x[3]])


def _oct_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # Cayley-Dickson doubling of the quaternions:
    # (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)).
    a, b = x[:4], x[4:]
    c, d = y[:4], y[4:]
    first = _quat_mul(a, c) - _quat_mul(_quat_conj(d), b)
    second = _quat_mul(d, a) + _quat_mul(b, _quat_conj(c))
    return np.concatenate([first, second])


def _complex_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.array([x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]])

_ALGEBRAS = {
    "complex": (2, _complex_mul),
    "quaternion": (4, _quat_mul),
    "octonion": (8, _oct_mul),
}


def _left_mult_matrix(dim: int, mul, unit: np.ndarray) -> np.ndarray:
    cols = [mul(unit, np.eye(dim)[:, j]) for j in range(dim)]
    return np.column_stack(cols)


def algebra_unit_matrices(name: str) -> list[np.ndarray]:
    """Left-multiplication matrices of all basis units, identity first."""
    if name not in _ALGEBRAS:
        raise InvalidInput(f"unknown algebra {name!r}; expected one of {sorted(_ALGEBRAS)}")
    dim, mul = _ALGEBRAS[name]
    return [_left_mult_matrix(dim, mul, np.eye(dim)[:, j]) for j in range(dim)]


def from_algebra(name: str, kp1: int) -> BilinearMap:
    """Bilinear map from left multiplication by the first kp1 basis units.

    The unit order is 1 first, then the imaginary units.  Norm
    multiplicativity makes every unit combination orthogonal, so the map
    is nonsingular with margin exactly |t|.
    """
    if name not in _ALGEBRAS:
        raise InvalidInput(f"unknown algebra {name!r}; expected one of {sorted(_ALGEBRAS)}")
    dim = _ALGEBRAS[name][0]
    if not (1 <= kp1 <= dim):
        raise InvalidInput(f"need 1 <= kp1 <= {dim} for {name}, got {kp1}")
    return BilinearMap(dim, kp1, tuple(algebra_unit_matrices(name)[:kp1]))


def _anticommuting_family(p: int) -> list[np.ndarray]:
    """Pairwise anticommuting orthogonal complex structures on R^p,
    p a power of two, of the maximal size rho(p) - 1."""
    if p == 1:
        return []
    if p == 2:
        return [J2]
    if p == 4:
        return [np.asarray(m) for m in algebra_unit_matrices("quaternion")[1:]]
    if p == 8:
        return [np.asarray(m) for m in algebra_unit_matrices("octonion")[1:]]
    # Bott step: a family of size s on R^t yields size s + 8 on R^(16t).
    sub = _anticommuting_family(p // 16)
    t = p // 16
    oct_imag = _anticommuting_family(8)
    v16 = [np.kron(o, _Q2) for o in oct_imag] + [np.kron(np.eye(8), J2)]
    w16 = np.kron(np.eye(8), _P2)
    fam = [np.kron(a, w16) for a in sub]
    fam += [np.kron(np.eye(t), v) for v in v16]
    return fam


def hurwitz_radon_family(q: int, r: int) -> BilinearMap:
    """A size-r family: the identity plus r-1 pairwise anticommuting
    orthogonal complex structures on R^q.  Requires r <= rho(q)."""
    if q < 1 or r < 1:
        raise InvalidInput(f"need q >= 1 and r >= 1, got q={q} r={r}")
    bound = rho(q)
    if r > bound:
        raise InvalidInput(f"family of size {r} on R^{q} exceeds the bound rho({q}) = {bound}")
    pow2 = q & -q
    odd = q // pow2
    base = _anticommuting_family(pow2)[: r - 1]
    mats = [np.eye(q)] + [np.kron(np.eye(odd), f) for f in base]
    return BilinearMap(q, r, tuple(mats))


def _pencil_exact(a: BilinearMap, tol: Tolerance) -> tuple[str, float, list, dict]:
    """Exact nonsingularity for kp1 = 2: the second matrix must be
    invertible and inv(M2) M1 must have no real eigenvalues."""
    m1, m2 = a.mats
    sv = np.linalg.svd(m2, compute_uv=False)
    details: dict = {"exact": True}
    if sv[-1] <= tol.threshold(float(sv[0])):
        details["reason"] = "second matrix is singular"
        return rp.FAIL, 0.0, [{"t": [0.0, 1.0]}], details
    g = np.linalg.solve(m2, m1)
    eig = np.linalg.eigvals(g)
    details["pencil_eigenvalues"] = [complex(v) for v in eig]
    imag_margin = float(np.min(np.abs(eig.imag)))
    details["imag_margin"] = imag_margin
    real_mask = np.abs(eig.imag) <= tol.rel * (1.0 + np.abs(eig))
    if np.any(real_mask):
        lam = float(eig.real[real_mask][0])
        t = np.array([1.0, -lam])
        t = t / np.linalg.norm(t)
        details["real_eigenvalue"] = lam
        return rp.FAIL, 0.0, [{"t": t.tolist(), "eigenvalue": lam}], details
    return rp.PASS, imag_margin, [], details


def verify_nonsingular(
    a: BilinearMap,
    samples: int = 256,
    stream: SampleStream | None = None,
    tol: Tolerance | None = None,
) -> rp.VerificationReport:
    """Sampled search for a singular combination sum_j t_j M_j.

    margin is the smallest sigma_min over sampled unit t.  For kp1 <= 2
    an exact test decides the verdict; otherwise a clean run is
    evidence-only, since sampling cannot certify nonsingularity.
    """
    tol = tol or Tolerance.default()
    stream = stream or SampleStream()
    if samples < 1:
        raise InvalidInput(f"need samples >= 1, got {samples}")
    sampling = {"seed": stream.seed, "mode": stream.mode, "count": samples}

    if a.kp1 == 1:
        sv = np.linalg.svd(a.mats[0], compute_uv=False)
        margin = float(sv[-1])
        if margin <= tol.threshold(float(sv[0])):
            return rp.VerificationReport(
                "nonsingular", rp.FAIL, margin, ({"t": [1.0]},), sampling, {"exact": True}
            )
        return rp.VerificationReport("nonsingular", rp.PASS, margin, (), sampling, {"exact": True})

    ts = stream.unit_vectors(samples, a.kp1)
    combos = np.einsum("sj,jab->sab", ts, np.stack(a.mats))
    sv = np.linalg.svd(combos, compute_uv=False)
    smin, smax = sv[:, -1], sv[:, 0]
    margins = smin.copy()
    bad = smin <= tol.rel * smax + tol.abs
    margin = float(np.min(margins)) if samples else float("inf")
    worst = int(np.argmin(margins)) if samples else -1
    details: dict = {"worst_t": ts[worst].tolist() if samples else None}

    if a.kp1 == 2:
        verdict, exact_margin, witnesses, exact_details = _pencil_exact(a, tol)
        details.update(exact_details)
        if verdict == rp.FAIL:
            return rp.VerificationReport(
                "nonsingular", rp.FAIL, 0.0, tuple(witnesses), sampling, details
            )
        details["sampled_margin"] = margin
        return rp.VerificationReport("nonsingular", rp.PASS, margin, (), sampling, details)

    if np.any(bad):
        idx = np.argmin(np.where(bad, smin, np.inf))
        witness = {"t": ts[int(idx)].tolist(), "sigma_min": float(smin[idx])}
        return rp.VerificationReport(
            "nonsingular", rp.FAIL, float(smin[idx]), (witness,), sampling, details
        )
    return rp.VerificationReport("nonsingular", rp.EVIDENCE, margin, (), sampling, details)
