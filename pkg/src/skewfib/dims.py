"""Admissible dimensions for skew and great-sphere fibrations.

The Hurwitz-Radon function rho drives everything: a fibration of R^n by
pairwise skew affine k-planes exists exactly when k <= rho(n - k) - 1,
and the admissible n for fixed k form the arithmetic progression
n = skew_period(k) * m + k.  Great-sphere fibrations are far scarcer:
fiber dimension must be 0, 1, 3, or 7, with the matching congruence on n.
"""

from __future__ import annotations

from .errors import InvalidInput


def rho(q: int) -> int:
    """Hurwitz-Radon function: q = odd * 2^(4a+b), 0 <= b <= 3 gives 2^b + 8a."""
    if q < 1:
        raise InvalidInput(f"rho needs q >= 1, got {q}")
    # 2-adic valuation via the lowest set bit.
    v = (q & -q).bit_length() - 1
    a, b = divmod(v, 4)
    return 2**b + 8 * a


def _check_pair(k: int, n: int) -> None:
    if not (0 <= k < n):
        raise InvalidInput(f"need 0 <= k < n, got (k, n) = ({k}, {n})")


def admissible_skew(k: int, n: int) -> bool:
    """True when R^n admits a fibration by pairwise skew affine k-planes."""
    _check_pair(k, n)
    return k <= rho(n - k) - 1


def skew_period(k: int) -> int:
    """Smallest q with rho(q) >= k + 1.

    Always a power of two; admissible_skew(k, n) holds exactly when
    skew_period(k) divides n - k.
    """
    if k < 0:
        raise InvalidInput(f"need k >= 0, got {k}")
    q = 1
    while rho(q) < k + 1:
        q *= 2
    return q


def admissible_sphere(k: int, n: int) -> bool:
    """True when S^n admits a fibration by great k-spheres.

    Fiber dimensions are restricted to 0, 1, 3, 7: points fiber every
    sphere, circles the odd-dimensional ones, 3-spheres those with
    n = 3 mod 4, and the 7-sphere fibers S^15 alone.
    """
    _check_pair(k, n)
    if k == 0:
        return True
    if k == 1:
        return n % 2 == 1
    if k == 3:
        return n % 4 == 3
    if k == 7:
        return n == 15
    return False


def skew_table(n_max: int) -> dict[int, list[int]]:
    """Admissible fiber dimensions k >= 1 for each n from 3 to n_max,
    listed largest first."""
    if n_max < 3:
        raise InvalidInput(f"need n_max >= 3, got {n_max}")
    table = {}
    for n in range(3, n_max + 1):
        ks = [k for k in range(1, n) if admissible_skew(k, n)]
        table[n] = sorted(ks, reverse=True)
    return table


def format_skew_table(n_max: int) -> str:
    """Text rendering of skew_table, one column per n."""
    table = skew_table(n_max)
    ns = sorted(table)
    width = max(3, len(str(n_max)) + 1)
    depth = max((len(v) for v in table.values()), default=0)
    lines = ["n" + "".join(f"{n:>{width}}" for n in ns)]
    for row in range(depth):
        cells = []
        for n in ns:
            ks = table[n]
            cells.append(f"{ks[row]:>{width}}" if row < len(ks) else " " * width)
        lines.append("k" if row == 0 else " ")
        lines[-1] += "".join(cells)
    return "\n".join(lines)
