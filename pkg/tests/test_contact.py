"""Tests for the fiber-orthogonal plane field and the contact dichotomy."""

import numpy as np
import pytest

from skewfib.contact import ContactReport, contact_check, contact_form, gluck_yang_matrix
from skewfib.errors import InvalidInput
from skewfib.fibration import Chart, block_rotation, builtin_chart
from skewfib.numeric import SampleStream, orthonormal_complement

RNG_SEED = 31415

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def test_contact_form_values():
    c = builtin_chart("hopf3")
    f0 = contact_form(c, np.zeros(2))
    assert np.array_equal(f0, np.array([1.0, 0.0, 0.0]))
    f1 = contact_form(c, np.array([1.0, 0.0]))
    # B(1, 0) = (0, 1), so the form is (1, 0, 1) / 2
    assert np.allclose(f1, np.array([0.5, 0.0, 0.5]), atol=1e-14)


def test_contact_form_annihilates_orthogonal_plane():
    rng = np.random.default_rng(RNG_SEED)
    c = builtin_chart("hopf_line", m=2, a=0.7, b=1.3)
    for _ in range(20):
        y = rng.uniform(-2.0, 2.0, 4)
        alpha = contact_form(c, y)
        d = np.concatenate([[1.0], c.B(y)[:, 0]])
        # the fiber direction pairs to 1, its orthocomplement to 0
        assert alpha @ d == pytest.approx(1.0, abs=1e-12)
        comp = orthonormal_complement((d / np.linalg.norm(d)).reshape(-1, 1))
        assert np.max(np.abs(alpha @ comp)) <= 1e-12


def test_contact_form_needs_line_chart():
    with pytest.raises(InvalidInput):
        contact_form(builtin_chart("hopf7"), np.zeros(4))


def test_contact_check_rotation_chart():
    """Block rotations carry the standard contact structure; at the
    origin the margin is exactly one."""
    for m in (1, 2, 3):
        c = builtin_chart("hopf_line", m=m, a=0.0, b=1.0)
        rep = contact_check(c, np.zeros(2 * m))
        assert rep.is_contact
        assert rep.det_margin == pytest.approx(1.0, abs=1e-6)


def test_contact_check_away_from_origin():
    rng = np.random.default_rng(RNG_SEED)
    c = builtin_chart("hopf3")
    for _ in range(10):
        y = rng.uniform(-2.0, 2.0, 2)
        rep = contact_check(c, y)
        assert rep.is_contact
        assert rep.det_margin > 1e-3


def test_contact_check_gluck_yang_degenerate():
    """The shifted-block construction fails the contact condition at 0."""
    for m in (2, 3):
        c = builtin_chart("gluck_yang", m=m)
        rep = contact_check(c, np.zeros(2 * m))
        assert not rep.is_contact
        assert rep.det_margin <= 1e-10


def test_contact_check_linear_cross_check():
    """At the origin of a linear chart the restricted form matches
    M - M^T up to one fitted scalar."""
    c = builtin_chart("hopf_line", m=2, a=1.0, b=2.0)
    rep = contact_check(c, np.zeros(4))
    assert rep.details["linear_mismatch"] <= 1e-6
    assert abs(rep.details["linear_scalar"]) > 0.1


def test_contact_check_basis_invariance():
    """det_margin must not depend on the choice of kernel basis."""
    rng = np.random.default_rng(RNG_SEED)
    c = builtin_chart("hopf_line", m=2, a=0.5, b=1.5)
    y = np.array([0.3, -0.2, 0.8, 0.1])
    alpha = contact_form(c, y)
    basis = orthonormal_complement((alpha / np.linalg.norm(alpha)).reshape(-1, 1))
    rep0 = contact_check(c, y)
    for _ in range(5):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        rep = contact_check(c, y, basis=basis @ q)
        assert rep.det_margin == pytest.approx(rep0.det_margin, rel=1e-8)
        assert rep.is_contact == rep0.is_contact


def test_contact_check_validation():
    with pytest.raises(InvalidInput):
        contact_check(builtin_chart("hopf7"), np.zeros(4))  # k = 3
    c = builtin_chart("hopf3")
    with pytest.raises(InvalidInput):
        contact_check(c, np.zeros(3))  # wrong point shape
    with pytest.raises(InvalidInput):
        contact_check(c, np.zeros(2), basis=np.eye(3)[:, :1])  # bad basis shape
    odd = Chart(1, 3, "linear", C=(np.eye(3),))
    with pytest.raises(InvalidInput):
        contact_check(odd, np.zeros(3))  # odd chart plane dimension


def test_contact_report_serialization():
    rep = contact_check(builtin_chart("hopf3"), np.zeros(2))
    data = rep.to_dict()
    assert set(data) == {"point", "det_margin", "is_contact"}
    assert data["is_contact"] is True
    assert isinstance(rep, ContactReport)


def test_gluck_yang_matrix_structure():
    m = gluck_yang_matrix(2)
    expected = np.kron(np.eye(2), -0.5 * J2)
    expected[0:2, 2:4] += np.eye(2)
    assert np.array_equal(m, expected)


def test_gluck_yang_matrix_spectrum_and_skew_part():
    for size in (2, 3, 5):
        m = gluck_yang_matrix(size)
        eig = np.linalg.eigvals(m)
        # nondegenerate: all eigenvalues are +-i/2
        assert np.max(np.abs(np.abs(eig.imag) - 0.5)) <= 1e-10
        assert np.max(np.abs(eig.real)) <= 1e-10
        # but the skew part is exactly singular
        skew = m - m.T
        assert np.linalg.svd(skew, compute_uv=False)[-1] <= 1e-12
        assert abs(np.linalg.det(skew)) <= 1e-12


def test_gluck_yang_matrix_rejects_small_m():
    with pytest.raises(InvalidInput):
        gluck_yang_matrix(1)


def test_gluck_yang_chart_is_nondegenerate_but_not_contact():
    from skewfib.fibration import verify_nondegenerate, verify_skew

    c = builtin_chart("gluck_yang", m=2)
    nd = verify_nondegenerate(c)
    assert nd.ok  # the fibration itself is fine
    sk = verify_skew(c, radius=10.0, samples=256, stream=SampleStream(seed=2))
    assert sk.verdict != "fail"
    rep = contact_check(c, np.zeros(4))
    assert not rep.is_contact  # only the plane field degenerates


def test_contact_check_smooth_chart():
    """The finite-difference path handles smooth charts near the origin."""
    from skewfib.fibration import extend_germ

    ext = extend_germ(builtin_chart("quad_germ", eps=0.05))
    rep = contact_check(ext, np.zeros(2))
    assert rep.is_contact
    assert 0.9 < rep.det_margin < 1.1


def test_block_rotation_det_margin_positive_on_grid():
    rng = np.random.default_rng(RNG_SEED)
    for a in (-1.0, 0.0, 1.5):
        for b in (-2.0, 1.0):
            c = builtin_chart("hopf_line", m=2, a=a, b=b)
            for _ in range(5):
                y = rng.uniform(-1.5, 1.5, 4)
                rep = contact_check(c, y)
                assert rep.is_contact, (a, b, y)
