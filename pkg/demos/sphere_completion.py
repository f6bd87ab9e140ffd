"""Complete a skew fibration of R^3 to great circles on S^3 and back.

Central projection from the upper hemisphere identifies affine lines in
R^3 with upper halves of great circles.  A fibration by skew lines
completes to a fibration of the whole sphere by great circles exactly
when every unit combination of its chart matrices is orthogonal, and
the resulting circle family is controlled by one rotation matrix.
"""

import numpy as np

from skewfib.fibration import builtin_chart, fiber_plane
from skewfib.grassmann import max_principal_angle
from skewfib.sphere import (
    assemble_great_circles,
    central_project,
    completion_check,
    great_sphere_of,
    invariant_on_planes,
    inverse_project,
)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def main():
    c = builtin_chart("hopf3")
    rep = completion_check(c)
    print(f"hopf3 completion: {'pass' if rep.ok else 'fail'}, margin {rep.margin:.12f}")

    x = np.array([0.7, -1.2, 2.0])
    p = inverse_project(x)
    back = central_project(p)
    print(f"projection round trip error at {x}: {np.linalg.norm(back - x):.3e}")

    # the fiber through a chart point maps onto a great circle
    plane = fiber_plane(c, np.array([1.0, 0.5]))
    circle = great_sphere_of(plane)
    thetas = np.linspace(0.0, np.pi, 7)
    for row in circle.points(np.stack([np.cos(thetas), np.sin(thetas)], axis=1)):
        if abs(row[-1]) > 1e-3:
            gap = central_project(row) - plane.base
            gap = gap - plane.direction.frame @ (plane.direction.frame.T @ gap)
            print(f"  circle point back on the affine fiber, error {np.linalg.norm(gap):.3e}")
            break

    # the whole circle family comes from one plane-invariant matrix
    m = J2
    rep = invariant_on_planes(m)
    print(f"rotation matrix invariant on planes: {rep.is_invariant}, (a, b) = ({rep.a}, {rep.b})")

    assign = assemble_great_circles(m)
    p_s = np.array([0.0, 1.0, 0.0, 0.0])
    limit = assign(p_s)
    for eps in (1e-2, 1e-3, 1e-4):
        w = np.array([0.6, 0.0, 0.0, 0.8])
        p = np.cos(eps) * p_s + np.sin(eps) * w
        angle = max_principal_angle(assign(p).frame, limit.frame)
        print(f"  circle convergence at distance {eps:.0e}: angle {angle:.3e}")


if __name__ == "__main__":
    main()
