"""Small helpers shared by several modules."""

import flint


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of a positive integer, ascending."""
    if n < 2:
        return []
    return sorted(int(p) for p, _ in flint.fmpz(n).factor())


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in flint.fmpz(abs(n)).factor():
        p = int(p)
        out = [d * p ** k for d in out for k in range(int(e) + 1)]
    return sorted(out)
