"""Smith normal form over the integers and linear algebra over F_p."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class SmithForm:
    divisors: tuple[int, ...]  # nonzero elementary divisors, d1 | d2 | ...
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def kernel_dim(self) -> int:
        return self.cols - self.rank

    def divisor_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.divisors:
            out[d] = out.get(d, 0) + 1
        return out

    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.divisors if d > 1)


def _copy(M: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, row)) for row in M]


def smith_normal_form(M: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Elementary divisors by unimodular row and column operations."""
    A = _copy(M)
    nr = len(A)
    nc = cols if cols is not None else (len(A[0]) if A else 0)
    divisors = []
    t = 0
    while True:
        # pivot: smallest nonzero absolute value in the remaining block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = A[i][j]
                if v and (piv is None or abs(v) < piv[0]):
                    piv = (abs(v), i, j)
                    if piv[0] == 1:
                        break
            if piv and piv[0] == 1:
                break
        if piv is None:
            break
        _, i, j = piv
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, nr):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        ri, rt = A[i], A[t]
                        for k in range(t, nc):
                            ri[k] -= q * rt[k]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for row in A[t:]:
                            row[j] -= q * row[t]
                    if A[t][j]:
                        done = False
            if done:
                # enforce divisibility against the rest of the block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if A[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                rb, rt = A[bad], A[t]
                for k in range(t, nc):
                    rt[k] += rb[k]
                continue
            # move the smallest entry of row/column t onto the pivot
            best = (abs(p), t, t)
            for i in range(t + 1, nr):
                if A[i][t] and abs(A[i][t]) < best[0]:
                    best = (abs(A[i][t]), i, t)
            for j in range(t + 1, nc):
                if A[t][j] and abs(A[t][j]) < best[0]:
                    best = (abs(A[t][j]), t, j)
            _, i, j = best
            if i != t:
                A[t], A[i] = A[i], A[t]
            if j != t:
                for row in A:
                    row[t], row[j] = row[j], row[t]
        divisors.append(abs(A[t][t]))
        t += 1
        if t >= nr or t >= nc:
            break
    return SmithForm(tuple(sorted(divisors)), nr, nc)


def rank_mod_p(M: Sequence[Sequence[int]], p: int = 2) -> int:
    A = [[v % p for v in row] for row in M]
    if not A or not A[0]:
        return 0
    nr, nc = len(A), len(A[0])
    r = 0
    for j in range(nc):
        piv = next((i for i in range(r, nr) if A[i][j]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][j], -1, p)
        A[r] = [(v * inv) % p for v in A[r]]
        for i in range(nr):
            if i != r and A[i][j]:
                f = A[i][j]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[r])]
        r += 1
        if r == nr:
            break
    return r


def transpose(M: Sequence[Sequence[int]], rows: int, cols: int) -> Matrix:
    return [[M[i][j] for i in range(rows)] for j in range(cols)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    if not A or not B:
        return []
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group Z^free + sum Z/t."""

    free: int
    torsion: tuple[int, ...]

    def hom_to_f2_dim(self) -> int:
        return self.free + sum(1 for t in self.torsion if t % 2 == 0)

    def __str__(self) -> str:
        parts = []
        if self.free:
            parts.append("Z" if self.free == 1 else f"Z^{self.free}")
        counts: dict[int, int] = {}
        for t in self.torsion:
            counts[t] = counts.get(t, 0) + 1
        for t in sorted(counts):
            parts.append(f"(Z/{t})^{counts[t]}" if counts[t] > 1 else f"Z/{t}")
        return " + ".join(parts) if parts else "0"


def cokernel(relations: Sequence[Sequence[int]], ngens: int) -> AbelianGroup:
    """Abelian group on ngens generators modulo the given relation rows."""
    if not relations:
        return AbelianGroup(ngens, ())
    snf = smith_normal_form(relations, cols=ngens)
    return AbelianGroup(ngens - snf.rank, snf.torsion())


def homology_group(d_in: Sequence[Sequence[int]] | None, d_out: Sequence[Sequence[int]] | None, n: int) -> AbelianGroup:
    """H = ker(d_out) / im(d_in) for the chain group of rank n.

    d_out maps C_n -> C_{n-1} and is given as a (rows = n-1 cells, cols = n) matrix;
    d_in maps C_{n+1} -> C_n likewise.
    """
    k = n - (smith_normal_form(d_out, cols=n).rank if d_out else 0)
    if d_in:
        snf = smith_normal_form(d_in)
        return AbelianGroup(k - snf.rank, snf.torsion())
    return AbelianGroup(k, ())
