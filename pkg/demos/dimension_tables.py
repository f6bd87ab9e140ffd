"""Print the dimension arithmetic behind skew fibrations.

Which pairs (k, n) admit a fibration of R^n by pairwise skew affine
k-planes is a pure two-adic computation.  This script prints the rho
values on powers of two, the fiber-dimension periods, and the
admissible table side by side with the stricter great-sphere condition.
"""

from skewfib.dims import admissible_skew, admissible_sphere, format_skew_table, rho, skew_period


def main():
    print("rho on powers of two")
    for v in range(9):
        q = 2 ** v
        print(f"  rho({q:3d}) = {rho(q)}")
    print()

    print("fiber-dimension periods (k admissible in R^n iff period | n - k)")
    for k in range(1, 15):
        print(f"  k = {k:2d}: period {skew_period(k)}")
    print()

    print("admissible fiber dimensions up to n = 24")
    print(format_skew_table(24))
    print()

    # sphere fibrations force n = 2k + 1 on top of the skew condition
    print("skew vs great-sphere admissibility, lines through R^n")
    for n in range(3, 17):
        skew = admissible_skew(1, n)
        sphere = admissible_sphere(1, n)
        tag = "both" if sphere else ("skew only" if skew else "neither")
        print(f"  n = {n:2d}: {tag}")


if __name__ == "__main__":
    main()
