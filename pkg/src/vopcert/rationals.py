"""Exact rational vectors and matrices on top of fractions.Fraction.

Everything downstream (LP, cones, certificates) goes through these helpers, so
no float ever enters the certificate path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Q = Fraction
Vec = Tuple[Fraction, ...]
Mat = Tuple[Vec, ...]

Q0 = Fraction(0)
Q1 = Fraction(1)


class RationalParseError(ValueError):
    """Raised for text that is not an integer or 'num/den' rational."""


def parse_rational(value) -> Fraction:
    """Parse an int or a 'num/den' / 'num' string. Floats are rejected."""
    if isinstance(value, bool):
        raise RationalParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise RationalParseError(f"decimal float not accepted here: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text or "E" in text:
            raise RationalParseError(f"decimal notation not accepted: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalParseError(f"malformed rational: {value!r}") from exc
    raise RationalParseError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Render as 'num' or 'num/den' (den > 0 is a Fraction invariant)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def qvec(values: Iterable) -> Vec:
    return tuple(parse_rational(v) for v in values)


def qmat(rows: Iterable[Iterable]) -> Mat:
    out = tuple(qvec(r) for r in rows)
    if out:
        width = len(out[0])
        for r in out:
            if len(r) != width:
                raise ValueError("ragged matrix")
    return out


def zeros(n: int) -> Vec:
    return (Q0,) * n


def unit(n: int, k: int, sign: int = 1) -> Vec:
    return tuple(Fraction(sign) if j == k else Q0 for j in range(n))


def vdot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    # caller guarantees equal lengths; zip would hide a mismatch
    if len(a) != len(b):
        raise ValueError("dimension mismatch in dot product")
    total = Q0
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return total


def vadd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return tuple(x - y for x, y in zip(a, b))


def vscale(c: Fraction, a: Sequence[Fraction]) -> Vec:
    return tuple(c * x for x in a)


def vneg(a: Sequence[Fraction]) -> Vec:
    return tuple(-x for x in a)


def is_zero_vec(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def mat_vec(m: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vec:
    return tuple(vdot(row, x) for row in m)


def transpose(m: Sequence[Sequence[Fraction]]) -> Mat:
    if not m:
        return ()
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0])))


def primitive(v: Sequence[Fraction]) -> Vec:
    """Canonical representative of the ray through v: integer entries, gcd 1.

    Direction (sign) is preserved; only positive scaling is normalized away.
    The zero vector maps to itself.
    """
    if is_zero_vec(v):
        return tuple(Q0 for _ in v)
    den_lcm = 1
    for x in v:
        den_lcm = den_lcm * x.denominator // math.gcd(den_lcm, x.denominator)
    ints = [x.numerator * (den_lcm // x.denominator) for x in v]
    g = 0
    for k in ints:
        g = math.gcd(g, k)
    return tuple(Fraction(k // g) for k in ints)


def dedup_rows(rows: Iterable[Sequence[Fraction]], drop_zero: bool = True) -> Mat:
    """Primitive-canonicalize, drop duplicates (and optionally zero rows).

    Output order follows first appearance, so the result is deterministic.
    """
    seen = set()
    out = []
    for r in rows:
        p = primitive(r)
        if drop_zero and is_zero_vec(p):
            continue
        if p not in seen:
            seen.add(p)
            out.append(p)
    return tuple(out)


def row_echelon(m: Sequence[Sequence[Fraction]]):
    """Fraction Gaussian elimination.

    Returns (rank, pivot column list, reduced rows) with reduced rows in RREF.
    """
    rows = [list(r) for r in m]
    if not rows:
        return 0, [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = Q1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return r, pivots, rows


def matrix_rank(m: Sequence[Sequence[Fraction]]) -> int:
    return row_echelon(m)[0]


def nullspace_basis(m: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Mat:
    """Basis of {x : m x = 0}. ncols is required when m has no rows."""
    if not m:
        if ncols is None:
            raise ValueError("ncols required for empty matrix")
        return tuple(unit(ncols, k) for k in range(ncols))
    ncols = len(m[0])
    rank, pivots, rows = row_echelon(m)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [Q0] * ncols
        v[fc] = Q1
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return tuple(basis)


def invert(m: Sequence[Sequence[Fraction]]) -> Mat:
    """Inverse of a square nonsingular matrix (raises ValueError otherwise)."""
    n = len(m)
    aug = [list(row) + [Q1 if i == j else Q0 for j in range(n)] for i, row in enumerate(m)]
    rank, pivots, rows = row_echelon(aug)
    if rank < n or pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return tuple(tuple(rows[i][n:]) for i in range(n))


def psd_witness(h: Sequence[Sequence[Fraction]]) -> Optional[Vec]:
    """None if the symmetric matrix is PSD, else v with v^T h v < 0.

    Exact congruence elimination: positive diagonal pivots are eliminated;
    a negative diagonal or an unmatched off-diagonal entry yields a witness,
    lifted back through the accumulated eliminations.
    """
    n = len(h)
    work = [[Fraction(h[i][j]) for j in range(n)] for i in range(n)]
    active = list(range(n))
    # elimination steps recorded as (pivot index, row of multipliers over active set)
    steps = []

    def lift(vec_by_index: dict) -> Vec:
        v = dict(vec_by_index)
        for piv, coeffs in reversed(steps):
            s = Q0
            for j, c in coeffs.items():
                s += c * v.get(j, Q0)
            v[piv] = -s
        out = [Q0] * n
        for j, val in v.items():
            out[j] = val
        return tuple(out)

    while active:
        neg = next((i for i in active if work[i][i] < 0), None)
        if neg is not None:
            return lift({neg: Q1})
        pos = next((i for i in active if work[i][i] > 0), None)
        if pos is None:
            # all active diagonals are zero; any off-diagonal entry is indefinite
            for i in active:
                for j in active:
                    if j > i and work[i][j] != 0:
                        s = Q1 if work[i][j] > 0 else -Q1
                        return lift({i: Q1, j: -s})
            return None
        d = work[pos][pos]
        coeffs = {j: work[pos][j] / d for j in active if j != pos}
        steps.append((pos, coeffs))
        rest = [j for j in active if j != pos]
        for i in rest:
            fi = work[i][pos] / d
            if fi:
                for j in rest:
                    work[i][j] -= fi * work[pos][j]
        active = rest
    return None


def frobenius_sq(m: Sequence[Sequence[Fraction]]) -> Fraction:
    total = Q0
    for row in m:
        for x in row:
            if x:
                total += x * x
    return total
