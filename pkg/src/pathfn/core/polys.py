"""Exact helpers for polynomials with rational coefficients.

Polynomials are tuples of ``Fraction`` coefficients in ascending powers of x.
Certified range bounds use the Bernstein convex-hull property: on [0,1] the
polynomial lies between the min and max of its Bernstein coefficients, and
de Casteljau subdivision tightens the hull.  Everything here is exact
rational arithmetic; "upper bound" always means a certified one.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Optional, Sequence, Tuple

Coeffs = Tuple[Fraction, ...]

_ZERO = Fraction(0)


def poly_normalize(coeffs: Sequence[Fraction]) -> Coeffs:
    cs = tuple(Fraction(c) for c in coeffs)
    while len(cs) > 1 and cs[-1] == 0:
        cs = cs[:-1]
    return cs if cs else (_ZERO,)


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[Fraction]) -> Coeffs:
    if len(coeffs) <= 1:
        return (_ZERO,)
    return tuple(Fraction(k) * coeffs[k] for k in range(1, len(coeffs)))


def poly_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    n = max(len(a), len(b))
    return poly_normalize(
        tuple((a[k] if k < len(a) else _ZERO) + (b[k] if k < len(b) else _ZERO) for k in range(n))
    )


def poly_scale(a: Sequence[Fraction], s: Fraction) -> Coeffs:
    return poly_normalize(tuple(s * c for c in a))


def poly_compose_affine(coeffs: Sequence[Fraction], p: Fraction, q: Fraction) -> Coeffs:
    """Coefficients of c(p + q*s) as a polynomial in s (exact binomial expansion)."""
    n = len(coeffs)
    out = [_ZERO] * n
    # powers of (p + q s) built incrementally
    pw = [Fraction(1)]  # (p + q s)^0
    for k, c in enumerate(coeffs):
        if c != 0:
            for j, w in enumerate(pw):
                out[j] += c * w
        if k + 1 < n:
            nxt = [_ZERO] * (len(pw) + 1)
            for j, w in enumerate(pw):
                nxt[j] += w * p
                nxt[j + 1] += w * q
            pw = nxt
    return poly_normalize(out)


def bernstein_coeffs(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Bernstein coefficients of the polynomial on [0, 1].

    With monomial coefficients a_k, b_i = sum_{k<=i} C(i,k)/C(n,k) * a_k.
    """
    cs = poly_normalize(coeffs)
    n = len(cs) - 1
    return tuple(
        sum((Fraction(comb(i, k), comb(n, k)) * cs[k] for k in range(0, i + 1)), _ZERO)
        for i in range(0, n + 1)
    )


def _decasteljau_split(b: Sequence[Fraction]) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Split a Bernstein coefficient vector at the midpoint of its interval."""
    rows = [list(b)]
    while len(rows[-1]) > 1:
        prev = rows[-1]
        rows.append([(prev[i] + prev[i + 1]) / 2 for i in range(len(prev) - 1)])
    left = tuple(row[0] for row in rows)
    right = tuple(rows[len(b) - 1 - i][i] for i in range(len(b)))
    return left, right


def _bernstein_leaves(b: Tuple[Fraction, ...], depth: int):
    if depth == 0:
        yield b
        return
    lo, hi = _decasteljau_split(b)
    yield from _bernstein_leaves(lo, depth - 1)
    yield from _bernstein_leaves(hi, depth - 1)


def poly_sup_abs(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction, depth: int = 4) -> Fraction:
    """Certified upper bound on sup |p| over [lo, hi].

    Exact for degree <= 2 (endpoints plus the rational critical point);
    otherwise the max-|Bernstein-coefficient| hull bound after ``depth``
    subdivision levels.
    """
    cs = poly_normalize(coeffs)
    if hi <= lo:
        return abs(poly_eval(cs, lo))
    if len(cs) <= 3:
        cands = [poly_eval(cs, lo), poly_eval(cs, hi)]
        if len(cs) == 3 and cs[2] != 0:
            xc = -cs[1] / (2 * cs[2])
            if lo < xc < hi:
                cands.append(poly_eval(cs, xc))
        return max(abs(v) for v in cands)
    on01 = poly_compose_affine(cs, lo, hi - lo)
    b = bernstein_coeffs(on01)
    return max(max(abs(c) for c in leaf) for leaf in _bernstein_leaves(b, depth))


def poly_min_exact_quadratic(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    cs = poly_normalize(coeffs)
    assert len(cs) <= 3
    cands = [poly_eval(cs, lo), poly_eval(cs, hi)]
    if len(cs) == 3 and cs[2] != 0:
        xc = -cs[1] / (2 * cs[2])
        if lo < xc < hi:
            cands.append(poly_eval(cs, xc))
    return min(cands)


def certify_nonneg(
    coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction, depth: int = 8
) -> Optional[bool]:
    """Decide p >= 0 on [lo, hi] when possible.

    Returns True (certified nonnegative), False (a witness value is negative),
    or None when subdivision up to ``depth`` is inconclusive (possible at an
    interior tangency to zero).
    """
    cs = poly_normalize(coeffs)
    if hi <= lo:
        return poly_eval(cs, lo) >= 0
    if len(cs) <= 3:
        return poly_min_exact_quadratic(cs, lo, hi) >= 0
    if poly_eval(cs, lo) < 0 or poly_eval(cs, hi) < 0:
        return False
    on01 = poly_compose_affine(cs, lo, hi - lo)

    def rec(b: Tuple[Fraction, ...], d: int) -> Optional[bool]:
        if all(c >= 0 for c in b):
            return True
        # Bernstein end coefficients are the polynomial's values
        if b[0] < 0 or b[-1] < 0:
            return False
        if d == 0:
            return None
        bl, br = _decasteljau_split(b)
        left = rec(bl, d - 1)
        if left is False:
            return False
        right = rec(br, d - 1)
        if right is False:
            return False
        if left is True and right is True:
            return True
        return None

    return rec(bernstein_coeffs(on01), depth)


def solve_linear_system(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Solve a small dense rational system by Gaussian elimination with pivoting."""
    n = len(rhs)
    a = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return tuple(a[i][n] for i in range(n))
