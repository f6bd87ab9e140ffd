"""Export fiber samples of the unit rotation line chart to CSV.

Writes two files into the working directory: points along fibers
through random chart points, and points along a circle of fibers.  The
same exports are available from the command line as

    skewfib sample --chart hopf3 --grid random:12:7 --steps 9 --t-range=-2:2 --out fibers.csv
    skewfib sample --chart hopf3 --grid circle:2:8 --steps 9 --t-range=-2:2 --out circle.csv
"""

import csv

import numpy as np

from skewfib.fibration import builtin_chart, sample_fibers
from skewfib.numeric import SampleStream


def _write(path, c, ids, idx, pts):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["fiber_id"]
            + [f"i{j + 1}" for j in range(c.k)]
            + [f"x{j + 1}" for j in range(c.n)]
        )
        for fid, ind, row in zip(ids, idx, pts):
            writer.writerow([int(fid)] + [int(v) for v in ind] + [repr(float(v)) for v in row])


def main():
    c = builtin_chart("hopf3")

    base = SampleStream(seed=7).ball_points(12, c.q, 7.0)
    ids, idx, pts = sample_fibers(c, base, t_range=(-2.0, 2.0), steps=9)
    _write("fibers.csv", c, ids, idx, pts)
    print(f"fibers.csv: {len(ids)} points on 12 random fibers")

    angles = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False)
    circle = np.stack([2.0 * np.cos(angles), 2.0 * np.sin(angles)], axis=1)
    ids, idx, pts = sample_fibers(c, circle, t_range=(-2.0, 2.0), steps=9)
    _write("circle.csv", c, ids, idx, pts)
    print(f"circle.csv: {len(ids)} points on a circle of 8 fibers")

    # each csv row is fiber_id, grid indices, then ambient coordinates
    with open("fibers.csv") as fh:
        for _ in range(3):
            print("  " + next(fh).rstrip())


if __name__ == "__main__":
    main()
