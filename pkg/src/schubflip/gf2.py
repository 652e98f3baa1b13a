"""Linear algebra over F_2 with rows and vectors packed into Python ints."""

from __future__ import annotations

from typing import Iterable, Sequence

__all__ = ["rank", "nullspace", "apply", "compose", "transpose", "identity", "span_contains"]


def _reduce(rows: Iterable[int]) -> dict[int, int]:
    """Echelon basis keyed by leading bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return basis


def rank(rows: Iterable[int]) -> int:
    return len(_reduce(rows))


def span_contains(rows: Sequence[int], vec: int) -> bool:
    basis = _reduce(rows)
    while vec:
        top = vec.bit_length() - 1
        if top not in basis:
            return False
        vec ^= basis[top]
    return True


def nullspace(rows: Iterable[int], ncols: int) -> list[int]:
    """Basis of ``{x : popcount(row & x) even for every row}``."""
    # reduced row echelon form, pivots on the lowest set bit
    piv: dict[int, int] = {}
    for r in rows:
        for col, prow in piv.items():
            if (r >> col) & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c in list(piv):
            if (piv[c] >> col) & 1:
                piv[c] ^= r
        piv[col] = r
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = 1 << f
        for col, prow in piv.items():
            if (prow >> f) & 1:
                x |= 1 << col
        basis.append(x)
    return basis


# A linear map on F_2^d is a tuple of column images: cols[i] = image of e_i.

def apply(cols: Sequence[int], x: int) -> int:
    y = 0
    i = 0
    while x:
        if x & 1:
            y ^= cols[i]
        x >>= 1
        i += 1
    return y


def compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """The map ``a o b``."""
    return tuple(apply(a, c) for c in b)


def identity(d: int) -> tuple[int, ...]:
    return tuple(1 << i for i in range(d))


def transpose(cols: Sequence[int], d: int) -> tuple[int, ...]:
    return tuple(sum(((cols[j] >> i) & 1) << j for j in range(len(cols))) for i in range(d))
