"""Tests for charts, fiber solving, skewness and nondegeneracy checks,
asymptotic probes, and germ extension."""

import numpy as np
import pytest

from skewfib.bilinear import BilinearMap, from_algebra, hurwitz_radon_family
from skewfib.errors import (
    InvalidInput,
    SingularLastColumn,
    SingularSystem,
)
from skewfib.fibration import (
    Chart,
    ConeProbe,
    block_rotation,
    builtin_chart,
    chart_from_dict,
    chart_to_dict,
    continuity_probe,
    extend_germ,
    fiber_containing_direction,
    fiber_distance,
    fiber_plane,
    fiber_solve,
    from_bilinear,
    limiting_direction,
    sample_fibers,
    verify_nondegenerate,
    verify_proper,
    verify_skew,
)
from skewfib.numeric import SampleStream

RNG_SEED = 424242

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _on_fiber_residual(c, y, x):
    """|B(y) t + y - plane part of x| for the ambient point x = (t, ...)."""
    t, plane = x[: c.k], x[c.k:]
    return float(np.linalg.norm(c.B(y) @ t + y - plane))


# ---------------------------------------------------------------------------
# chart construction


def test_from_bilinear_complex():
    c = from_bilinear(from_algebra("complex", 2))
    assert c.k == 1 and c.q == 2 and c.n == 3
    # C1 = inv(M2) M1 = inv(J) = -J
    assert np.allclose(c.C[0], -J2, atol=1e-14)


def test_from_bilinear_divides_by_last_slot():
    a = from_algebra("quaternion", 4)
    c = from_bilinear(a)
    inv_last = np.linalg.inv(a.mats[-1])
    for j in range(3):
        assert np.max(np.abs(c.C[j] - inv_last @ a.mats[j])) <= 1e-12


def test_from_bilinear_singular_last_slot():
    with pytest.raises(SingularLastColumn):
        from_bilinear(BilinearMap(2, 2, (np.eye(2), np.zeros((2, 2)))))
    with pytest.raises(InvalidInput):
        from_bilinear(BilinearMap(2, 1, (np.eye(2),)))


def test_builtin_hopf3_is_unit_rotation():
    c = builtin_chart("hopf3")
    assert (c.k, c.q) == (1, 2)
    assert np.array_equal(c.C[0], J2)
    line = builtin_chart("hopf_line", m=1, a=0.0, b=1.0)
    assert np.array_equal(c.C[0], line.C[0])


def test_builtin_dimensions():
    assert builtin_chart("hopf7").n == 7
    assert builtin_chart("hopf15").n == 15
    assert builtin_chart("hopf_line", m=3, a=1.0, b=-2.0).n == 7
    assert builtin_chart("gluck_yang", m=2).n == 5
    g = builtin_chart("quad_germ", eps=0.1)
    assert g.n == 3 and g.domain_radius == 1.0


def test_builtin_hopf_line_matrix():
    c = builtin_chart("hopf_line", m=2, a=1.0, b=2.0)
    expected = np.eye(4) + 2.0 * block_rotation(2)
    assert np.array_equal(c.C[0], expected)
    eig = np.linalg.eigvals(c.C[0])
    assert np.allclose(np.sort(eig.imag), [-2.0, -2.0, 2.0, 2.0], atol=1e-12)


def test_builtin_rejects_bad_params():
    with pytest.raises(InvalidInput):
        builtin_chart("hopf_line", m=0, a=0.0, b=1.0)
    with pytest.raises(InvalidInput):
        builtin_chart("hopf_line", m=2, a=1.0, b=0.0)
    with pytest.raises(InvalidInput):
        builtin_chart("perelman")


def test_chart_status_lifecycle():
    c = builtin_chart("hopf3")
    assert c.status == "candidate"
    v = c.mark_verified(0.5)
    assert v.status == "verified" and v.verified_margin == 0.5
    assert c.status == "candidate"  # original untouched


def test_with_offset():
    c = builtin_chart("hopf3")
    shifted = c.with_offset(np.array([[1.0], [2.0]]))
    assert shifted.kind == "affine"
    y = np.array([0.5, -0.25])
    assert np.allclose(shifted.B(y), c.B(y) + [[1.0], [2.0]], atol=1e-14)
    germ = builtin_chart("quad_germ")
    with pytest.raises(InvalidInput):
        germ.with_offset(np.zeros((2, 1)))


def test_chart_derivative_tensor():
    c = builtin_chart("hopf7")
    y = np.array([0.3, -0.2, 0.5, 0.1])
    t = c.dB(y)
    assert t.shape == (4, 3, 4)
    for j, mat in enumerate(c.dB_mats(y)):
        assert np.array_equal(mat, c.C[j])
    # finite differences agree on the smooth germ
    g = builtin_chart("quad_germ", eps=0.2)
    analytic = g.dB(np.array([0.1, 0.2]))
    no_db = Chart(1, 2, "builtin", name="quad_germ", params={"eps": 0.2},
                  domain_radius=1.0, b_func=g.b_func)
    numeric = no_db.dB(np.array([0.1, 0.2]))
    assert np.max(np.abs(analytic - numeric)) <= 1e-6


# ---------------------------------------------------------------------------
# fiber solving


def test_fiber_solve_at_zero_parameter():
    c = builtin_chart("hopf7")
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(10):
        y = rng.standard_normal(4)
        x = np.concatenate([np.zeros(3), y])
        assert np.max(np.abs(fiber_solve(c, x) - y)) <= 1e-12


def test_fiber_solve_round_trip():
    rng = np.random.default_rng(RNG_SEED)
    charts = [
        builtin_chart("hopf3"),
        builtin_chart("hopf7"),
        builtin_chart("hopf_line", m=2, a=-1.0, b=3.0),
        extend_germ(builtin_chart("quad_germ", eps=0.05)),
    ]
    for c in charts:
        for _ in range(25):
            y = rng.uniform(-5.0, 5.0, c.q)
            t = rng.uniform(-3.0, 3.0, c.k)
            x = np.concatenate([t, c.B(y) @ t + y])
            sol = fiber_solve(c, x)
            assert np.max(np.abs(sol - y)) <= 1e-8 * (1.0 + np.max(np.abs(y)))
            assert _on_fiber_residual(c, sol, x) <= 1e-10 * (1.0 + float(np.linalg.norm(x)))


def test_fiber_solve_singular_combination():
    # B(y) = -y makes the solve matrix vanish at parameter t = 1
    c = Chart(1, 2, "linear", C=(-np.eye(2),))
    with pytest.raises(SingularSystem):
        fiber_solve(c, np.array([1.0, 0.3, 0.4]))


def test_fiber_plane_through_origin():
    c = builtin_chart("hopf3")
    p = fiber_plane(c, np.zeros(2))
    assert p.k == 1 and p.n == 3
    assert np.allclose(np.abs(p.direction.frame[:, 0]), [1.0, 0.0, 0.0], atol=1e-12)
    assert np.allclose(p.base, 0.0, atol=1e-14)


def test_fiber_plane_off_origin():
    c = builtin_chart("hopf3")
    p = fiber_plane(c, np.array([0.0, 1.0]))
    # direction (1, B(y)) with B(0, 1) = (-1, 0)
    d = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    assert abs(abs(p.direction.frame[:, 0] @ d) - 1.0) <= 1e-12
    assert np.allclose(p.base, [0.0, 0.0, 1.0], atol=1e-12)
    # base point sits on the fiber and is orthogonal to it
    assert abs(p.direction.frame[:, 0] @ p.base) <= 1e-12


def test_fiber_distance_values():
    c = builtin_chart("hopf3")
    assert fiber_distance(c, np.zeros(3)) <= 1e-12
    for h in (1.0, 10.0, 250.0):
        x = np.array([0.0, 0.0, h])
        assert fiber_distance(c, x) == pytest.approx(h, rel=1e-10)


def test_fiber_distance_diverges():
    c = builtin_chart("hopf7")
    rng = np.random.default_rng(RNG_SEED)
    w = rng.standard_normal(4)
    w /= np.linalg.norm(w)
    prev = 0.0
    for r in (1e2, 1e3, 1e4):
        d = fiber_distance(c, np.concatenate([np.zeros(3), r * w]))
        assert d > prev
        prev = d


# ---------------------------------------------------------------------------
# verification


def test_skew_kernel_margin_matches_direct_svd():
    """Margin equals min sigma_min([B(x)-B(y) | x-y]) / |x-y| over pairs."""
    c = builtin_chart("hopf_line", m=2, a=0.5, b=1.5)
    stream = SampleStream(seed=99)
    xs, ys = SampleStream(seed=99).pairs_in_ball(64, c.q, 10.0)
    direct = np.inf
    for x, y in zip(xs, ys):
        mat = np.column_stack([c.B(x) - c.B(y), x - y])
        sv = np.linalg.svd(mat, compute_uv=False)
        direct = min(direct, sv[-1] / np.linalg.norm(x - y))
    rep = verify_skew(c, radius=10.0, samples=64, stream=stream)
    assert rep.margin == pytest.approx(direct, rel=1e-12)
    assert rep.verdict == "evidence-only"


def test_skew_margin_of_unit_rotation_is_one():
    rep = verify_skew(builtin_chart("hopf3"), radius=50.0, samples=512)
    assert abs(rep.margin - 1.0) <= 1e-9


def test_skew_fails_for_parallel_fibers():
    c = Chart(1, 2, "linear", C=(np.zeros((2, 2)),))
    rep = verify_skew(c, radius=5.0, samples=128)
    assert rep.verdict == "fail"
    assert rep.witnesses
    w = rep.witnesses[0]
    assert "x" in w and "y" in w and w["sigma_min"] <= 1e-10


def test_skew_rejects_single_sample():
    with pytest.raises(InvalidInput):
        verify_skew(builtin_chart("hopf3"), samples=1)


def test_nondegenerate_exact_line_charts():
    for a, b in [(0.0, 1.0), (1.0, 2.0), (-3.0, -0.5)]:
        c = builtin_chart("hopf_line", m=2, a=a, b=b)
        rep = verify_nondegenerate(c)
        assert rep.verdict == "pass"
        # the 2x2 block path makes the eigenvalue margin exactly |b|
        assert rep.margin == abs(b)
        assert rep.details["exact"] is True


def test_nondegenerate_fails_on_real_eigenvalues():
    c = Chart(1, 2, "linear", C=(np.diag([1.0, 2.0]),))
    rep = verify_nondegenerate(c)
    assert rep.verdict == "fail"
    assert rep.witnesses[0]["eigenvalue"] in (1.0, 2.0)


def test_nondegenerate_sampled_plane_chart():
    rep = verify_nondegenerate(builtin_chart("hopf7"), samples=128)
    assert rep.verdict == "evidence-only"
    assert abs(rep.margin - 1.0) <= 1e-9


def test_nondegenerate_smooth_chart():
    ext = extend_germ(builtin_chart("quad_germ", eps=0.05))
    rep = verify_nondegenerate(ext, radius=5.0, samples=256)
    assert rep.ok
    assert rep.margin > 0.5


def test_proper_growth():
    rep = verify_proper(builtin_chart("hopf3"))
    assert rep.ok
    assert rep.margin >= 10.0
    with pytest.raises(InvalidInput):
        verify_proper(builtin_chart("hopf3"), radii=(100.0,))
    with pytest.raises(InvalidInput):
        verify_proper(builtin_chart("hopf3"), radii=(100.0, 50.0))


# ---------------------------------------------------------------------------
# asymptotics


def test_cone_probe_validation():
    ell = np.array([1.0, 0.0, 0.0])
    probe = ConeProbe(ell, (1e2, 1e3))
    assert probe.points().shape == (2, 3)
    with pytest.raises(InvalidInput):
        ConeProbe(2.0 * ell, (1e2, 1e3))  # not unit
    with pytest.raises(InvalidInput):
        ConeProbe(ell, (1e3, 1e2))  # not increasing
    with pytest.raises(InvalidInput):
        ConeProbe(ell, ())
    with pytest.raises(InvalidInput):
        ConeProbe(ell, (1e2, 1e3), delta=2.0)
    with pytest.raises(InvalidInput):
        # base offset so large the first point leaves the cone
        ConeProbe(ell, (1.0, 10.0), base=np.array([0.0, 50.0, 0.0]))


def test_fiber_containing_direction():
    c = builtin_chart("hopf3")
    y = fiber_containing_direction(c, np.array([1.0, 0.0, 0.0]))
    assert np.max(np.abs(y)) <= 1e-12
    # a direction inside the chart plane belongs to no fiber
    with pytest.raises(InvalidInput):
        fiber_containing_direction(c, np.array([0.0, 1.0, 0.0]))


def test_continuity_probe_decays():
    c = builtin_chart("hopf3")
    ell = np.array([1.0, 0.0, 0.0])
    base = np.array([0.0, 2.0, 0.0])
    probe = ConeProbe(ell, (1e2, 1e4, 1e6), base=base)
    angles = continuity_probe(c, ell, probe)
    assert angles[0] > angles[1] > angles[2]
    assert angles[2] <= 1e-5
    # one-over-t decay: each two-decade step shrinks the angle ~100x
    assert angles[1] / angles[0] <= 0.02
    assert angles[2] / angles[1] <= 0.02


def test_continuity_probe_along_own_fiber():
    c = builtin_chart("hopf7")
    y = np.array([0.5, -1.0, 0.25, 2.0])
    plane = fiber_plane(c, y)
    d = plane.direction.frame[:, 0]
    probe = ConeProbe(d, (10.0, 100.0), base=plane.base)
    angles = continuity_probe(c, d, probe)
    assert max(angles) <= 1e-6


def test_limiting_direction_closed_form():
    """Richardson limit matches C (I + v_t C)^-1 u computed directly."""
    rng = np.random.default_rng(RNG_SEED)
    for m, a, b in [(1, 0.0, 1.0), (2, 1.0, 2.0), (3, -0.5, 1.5)]:
        c = builtin_chart("hopf_line", m=m, a=a, b=b)
        cmat = c.C[0]
        for _ in range(10):
            uq = rng.standard_normal(c.q)
            uq /= np.linalg.norm(uq)
            u = np.concatenate([[0.0], uq])
            v = rng.standard_normal(c.n)
            v -= (v @ u) * u
            got = limiting_direction(c, u, v)
            lim = cmat @ np.linalg.solve(np.eye(c.q) + v[0] * cmat, uq)
            expected = np.concatenate([[0.0], lim])
            expected /= np.linalg.norm(expected)
            err = min(np.linalg.norm(got - expected), np.linalg.norm(got + expected))
            assert err <= 1e-6


def test_limiting_direction_validation():
    c = builtin_chart("hopf3")
    u = np.array([0.0, 1.0, 0.0])
    with pytest.raises(InvalidInput):
        limiting_direction(builtin_chart("hopf7"), np.zeros(7), np.zeros(7))
    with pytest.raises(InvalidInput):
        limiting_direction(c, 2.0 * u, np.zeros(3))  # not unit
    with pytest.raises(InvalidInput):
        limiting_direction(c, np.array([1.0, 0.0, 0.0]), np.zeros(3))  # not in chart plane
    with pytest.raises(InvalidInput):
        limiting_direction(c, u, u)  # v not orthogonal to u


# ---------------------------------------------------------------------------
# germ extension


def test_extend_germ_linear_passthrough():
    c = builtin_chart("hopf3")
    assert extend_germ(c) is c


def test_extend_germ_blend_structure():
    germ = builtin_chart("quad_germ", eps=0.05)
    ext = extend_germ(germ)
    assert ext.name == "germ_extension"
    assert ext.status == "verified"
    r = ext.params["blend_r"]
    rng = np.random.default_rng(RNG_SEED)
    # bitwise agreement with the germ inside the inner half zone
    for _ in range(100):
        y = rng.uniform(-1.0, 1.0, 2)
        y *= rng.uniform(0.0, 0.5 * r) / max(np.linalg.norm(y), 1e-300)
        assert np.array_equal(ext.B(y), germ.B(y))
    # exact linearization outside the blend zone
    b0 = germ.B(np.zeros(2))
    t0 = germ.dB(np.zeros(2))
    for _ in range(100):
        y = rng.standard_normal(2)
        y *= rng.uniform(1.001 * r, 50.0) / np.linalg.norm(y)
        lin = b0 + np.einsum("ijl,l->ij", t0, y)
        assert np.max(np.abs(ext.B(y) - lin)) <= 1e-14


def test_extend_germ_rejects_degenerate_origin():
    def b(y):
        return np.asarray(y, dtype=float).reshape(2, 1)  # dB_0 = identity

    degenerate = Chart(1, 2, "builtin", name=None, b_func=b)
    with pytest.raises(InvalidInput):
        extend_germ(degenerate)


def test_extend_germ_blend_radius_cap():
    germ = builtin_chart("quad_germ", eps=0.05)
    with pytest.raises(InvalidInput):
        extend_germ(germ, blend_r=5.0)  # exceeds the unit domain radius


# ---------------------------------------------------------------------------
# sampling and serialization


def test_sample_fibers_line_chart():
    c = builtin_chart("hopf3")
    bases = np.array([[0.0, 0.0], [1.0, 2.0]])
    ids, idx, pts = sample_fibers(c, bases, t_range=(-1.0, 1.0), steps=5)
    assert ids.shape == (10,) and idx.shape == (10, 1) and pts.shape == (10, 3)
    assert set(ids.tolist()) == {0, 1}
    for fid, x in zip(ids, pts):
        assert _on_fiber_residual(c, bases[fid], x) <= 1e-12


def test_sample_fibers_plane_chart():
    c = from_bilinear(hurwitz_radon_family(4, 3))
    assert c.k == 2
    ids, idx, pts = sample_fibers(c, np.zeros((1, 4)), steps=3)
    assert pts.shape == (9, 6) and idx.shape == (9, 2)
    with pytest.raises(InvalidInput):
        sample_fibers(c, np.zeros((1, 3)))
    with pytest.raises(InvalidInput):
        sample_fibers(c, np.zeros((1, 4)), t_range=(1.0, -1.0))


def test_chart_json_round_trip_linear():
    for c in (builtin_chart("hopf7"), builtin_chart("hopf_line", m=2, a=0.5, b=1.0)):
        data = chart_to_dict(c)
        assert data["schema"] == "skewfib-chart-v1"
        back = chart_from_dict(data)
        assert (back.k, back.q, back.kind) == (c.k, c.q, c.kind)
        for m1, m2 in zip(back.C, c.C):
            assert np.array_equal(m1, m2)
        assert back.name == c.name


def test_chart_json_round_trip_affine():
    c = builtin_chart("hopf3").with_offset(np.array([[1.5], [-2.0]]))
    back = chart_from_dict(chart_to_dict(c))
    y = np.array([0.7, 0.1])
    assert np.array_equal(back.B(y), c.B(y))


def test_chart_json_round_trip_extension():
    ext = extend_germ(builtin_chart("quad_germ", eps=0.07))
    back = chart_from_dict(chart_to_dict(ext))
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        y = rng.uniform(-3.0, 3.0, 2)
        assert np.array_equal(back.B(y), ext.B(y))


def test_chart_from_dict_errors():
    with pytest.raises(InvalidInput):
        chart_from_dict({"kind": "linear", "k": 1})  # missing q
    with pytest.raises(InvalidInput):
        chart_from_dict({"kind": "spectral", "k": 1, "q": 2})
    with pytest.raises(InvalidInput):
        chart_from_dict({"kind": "builtin", "k": 1, "q": 2, "builtin": {}})
    with pytest.raises(InvalidInput):
        chart_from_dict(
            {"kind": "builtin", "k": 2, "q": 2, "builtin": {"name": "hopf3", "params": {}}}
        )


def test_anonymous_smooth_chart_not_serializable():
    def b(y):
        return np.asarray([[y[1]], [-y[0]]], dtype=float)

    c = Chart(1, 2, "builtin", b_func=b)
    with pytest.raises(InvalidInput):
        chart_to_dict(c)
