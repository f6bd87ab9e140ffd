"""Contrast contact and non-contact fibrations of R^3 and R^5.

A fibration by skew lines induces a plane field orthogonal to the
fibers.  For the rotation family the field is contact (maximally
non-integrable); for the shifted-block family it degenerates at the
origin even though the fibration itself stays nondegenerate.  The
determinant margin of the restricted derivative separates the two.
"""

import numpy as np

from skewfib.contact import contact_check, gluck_yang_matrix
from skewfib.fibration import builtin_chart, verify_nondegenerate
from skewfib.numeric import SampleStream


def main():
    for m, a, b in ((1, 0.0, 1.0), (2, 1.0, 2.0)):
        c = builtin_chart("hopf_line", m=m, a=a, b=b)
        margins = [
            contact_check(c, y).det_margin
            for y in SampleStream(seed=5).ball_points(10, c.q, 2.0)
        ]
        print(f"rotation chart m={m}, a={a}, b={b}: contact everywhere sampled,")
        print(f"  det margins in [{min(margins):.4f}, {max(margins):.4f}]")

    for m in (2, 3):
        c = builtin_chart("gluck_yang", m=m)
        nd = verify_nondegenerate(c)
        rep = contact_check(c, np.zeros(2 * m))
        eig = np.linalg.eigvals(gluck_yang_matrix(m))
        print(f"shifted-block chart m={m}:")
        print(f"  nondegenerate {nd.verdict}, eigenvalue margin {np.min(np.abs(eig.imag)):.3f}")
        print(f"  contact at 0: {rep.is_contact}, det margin {rep.det_margin:.3e}")


if __name__ == "__main__":
    main()
