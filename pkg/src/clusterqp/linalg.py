"""Exact linear algebra helpers on top of sympy's ``DomainMatrix``.

Matrices are dense ``DomainMatrix`` objects over ``QQ`` or ``GF(p)``.  Only the
handful of operations the module code needs are wrapped here, with shapes
that survive zero-sized dimensions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix

__all__ = [
    "QQ",
    "GF",
    "DomainMatrix",
    "field_of",
    "mat",
    "zeros",
    "eye",
    "rank",
    "kernel_basis",
    "image_basis",
    "solve",
    "quotient_maps",
    "reduce_mod",
    "to_rows",
    "hstack",
    "vstack",
    "block_diag",
    "is_zero",
    "to_fraction",
]


def field_of(K) -> str:
    """JSON tag of a coefficient domain."""
    if K == QQ:
        return "Q"
    return f"F{K.mod}"


def mat(rows: Sequence[Sequence], K=QQ, shape: tuple[int, int] | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    if shape[0] == 0 or shape[1] == 0:
        return zeros(*shape, K)
    return DomainMatrix([[_conv(x, K) for x in r] for r in rows], shape, K)


def _conv(x, K):
    if K == QQ:
        if isinstance(x, Fraction):
            return QQ(x.numerator, x.denominator)
        if isinstance(x, str):
            f = Fraction(x)
            return QQ(f.numerator, f.denominator)
        return QQ.convert(x)
    if isinstance(x, Fraction):
        return K(x.numerator) / K(x.denominator)
    return K(int(x))


def zeros(m: int, n: int, K=QQ) -> DomainMatrix:
    return DomainMatrix([[K.zero] * n for _ in range(m)], (m, n), K)


def eye(n: int, K=QQ) -> DomainMatrix:
    return DomainMatrix.eye(n, K).to_dense()


def rank(M: DomainMatrix) -> int:
    m, n = M.shape
    if m == 0 or n == 0:
        return 0
    return M.rank()


def to_rows(M: DomainMatrix) -> list[list]:
    m, n = M.shape
    if m == 0:
        return []
    if n == 0:
        return [[] for _ in range(m)]
    return M.to_dense().rep.to_list()


def is_zero(M: DomainMatrix) -> bool:
    return all(not x for row in to_rows(M) for x in row)


def kernel_basis(M: DomainMatrix) -> DomainMatrix:
    """Columns spanning the right nullspace of ``M`` (shape ``n x k``)."""
    m, n = M.shape
    K = M.domain
    if n == 0:
        return zeros(0, 0, K)
    if m == 0:
        return eye(n, K)
    ns = M.to_dense().nullspace()
    k = ns.shape[0]
    if k == 0:
        return zeros(n, 0, K)
    return ns.to_dense().transpose()


def image_basis(M: DomainMatrix) -> DomainMatrix:
    """Columns of ``M`` forming a basis of its column space."""
    m, n = M.shape
    K = M.domain
    if m == 0 or n == 0:
        return zeros(m, 0, K)
    _, pivots = M.to_dense().rref()
    rows = to_rows(M)
    return _from_cols([[rows[i][j] for i in range(m)] for j in pivots], m, K)


def _from_cols(cols: list[list], m: int, K) -> DomainMatrix:
    if not cols:
        return zeros(m, 0, K)
    if m == 0:
        return zeros(0, len(cols), K)
    return DomainMatrix([[c[i] for c in cols] for i in range(m)], (m, len(cols)), K)


def hstack(mats: Sequence[DomainMatrix], m: int | None = None, K=QQ) -> DomainMatrix:
    mats = [A for A in mats if A.shape[1] > 0]
    if not mats:
        return zeros(m or 0, 0, K)
    rows = [sum((to_rows(A)[i] for A in mats), []) for i in range(mats[0].shape[0])]
    return mat(rows, mats[0].domain, (mats[0].shape[0], sum(A.shape[1] for A in mats)))


def vstack(mats: Sequence[DomainMatrix], n: int | None = None, K=QQ) -> DomainMatrix:
    mats = [A for A in mats if A.shape[0] > 0]
    if not mats:
        return zeros(0, n or 0, K)
    rows = sum((to_rows(A) for A in mats), [])
    return mat(rows, mats[0].domain, (len(rows), mats[0].shape[1]))


def block_diag(mats: Sequence[DomainMatrix], K=QQ) -> DomainMatrix:
    m = sum(A.shape[0] for A in mats)
    n = sum(A.shape[1] for A in mats)
    out = [[K.zero] * n for _ in range(m)]
    r = c = 0
    for A in mats:
        for i, row in enumerate(to_rows(A)):
            for j, x in enumerate(row):
                out[r + i][c + j] = x
        r += A.shape[0]
        c += A.shape[1]
    return mat(out, K, (m, n))


def solve(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    """Solve ``A X = B`` exactly; raise ``ValueError`` when inconsistent.

    When ``A`` has independent columns the solution is unique.
    """
    m, n = A.shape
    K = A.domain
    k = B.shape[1]
    if n == 0:
        if not is_zero(B):
            raise ValueError("inconsistent linear system")
        return zeros(0, k, K)
    if k == 0:
        return zeros(n, 0, K)
    if m == 0:
        return zeros(n, k, K)
    aug = hstack([A, B])
    R, pivots = aug.to_dense().rref()
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    rows = to_rows(R)
    X = [[K.zero] * k for _ in range(n)]
    for r, p in enumerate(pivots):
        for j in range(k):
            X[p][j] = rows[r][n + j]
    return mat(X, K, (n, k))


def quotient_maps(S: DomainMatrix, n: int) -> tuple[DomainMatrix, DomainMatrix]:
    """For a subspace with basis columns ``S`` of ``K^n`` return ``(pi, sec)``.

    ``pi`` (``c x n``) is a surjection with kernel ``span(S)`` and ``sec``
    (``n x c``) satisfies ``pi @ sec == I``; ``sec`` uses standard basis vectors.
    """
    K = S.domain
    basis = image_basis(S) if S.shape[1] else zeros(n, 0, K)
    r = basis.shape[1]
    cols = [list(c) for c in zip(*to_rows(basis))] if r and n else []
    extra = []
    for j in range(n):
        e = [K.zero] * n
        e[j] = K.one
        cand = _from_cols(cols + [e], n, K)
        if rank(cand) > len(cols):
            cols.append(e)
            extra.append(j)
        if len(cols) == n:
            break
    c = len(extra)
    if n == 0:
        return zeros(0, 0, K), zeros(0, 0, K)
    full = _from_cols(cols, n, K)
    inv = full.inv()
    inv_rows = to_rows(inv)
    pi = mat(inv_rows[r:], K, (c, n))
    sec_rows = [[K.one if extra[t] == i else K.zero for t in range(c)] for i in range(n)]
    sec = mat(sec_rows, K, (n, c))
    return pi, sec


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def reduce_mod(M: DomainMatrix, p: int) -> DomainMatrix:
    """Reduce a rational matrix modulo ``p``; ``ValueError`` if ``p`` divides a denominator."""
    K = GF(p)
    rows = []
    for row in to_rows(M):
        out = []
        for x in row:
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise ValueError(f"prime {p} divides a denominator")
            out.append(K(num) / K(den))
        rows.append(out)
    return mat(rows, K, M.shape)


def denominators(mats: Iterable[DomainMatrix]) -> int:
    """Least common multiple of all entry denominators."""
    from math import lcm

    d = 1
    for M in mats:
        for row in to_rows(M):
            for x in row:
                d = lcm(d, int(x.denominator))
    return d
