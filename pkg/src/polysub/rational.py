"""Exact rational scalars, vectors and the small amount of linear algebra the
rest of the package needs.

Scalars are :class:`fractions.Fraction` (always kept in lowest terms by the
standard library).  Vectors are tuples of fractions, matrices are sequences of
such tuples.  Elimination is done on integer rows with per-row gcd reduction so
intermediate values stay small.
"""
import re
from fractions import Fraction
from math import gcd, lcm

__all__ = [
    "Singular",
    "parse_rational",
    "format_rational",
    "as_vec",
    "dot",
    "sign",
    "integer_row",
    "primitive_row",
    "rank",
    "solve_square",
    "homogeneous_feasible",
    "cone_feasible",
]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class Singular(ArithmeticError):
    """Raised by :func:`solve_square` for a singular system."""


def parse_rational(token):
    """Parse ``"-7/3"``, ``"4"``, ``"+2"`` (a Unicode minus is accepted)."""
    text = token.strip().replace("−", "-")
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"malformed rational {token!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ValueError(f"zero denominator in {token!r}")
    return Fraction(text)


def format_rational(x):
    return str(Fraction(x))


def as_vec(values):
    return tuple(Fraction(v) for v in values)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sign(x):
    return (x > 0) - (x < 0)


def integer_row(row):
    """Scale a rational row by the lcm of its denominators."""
    row = [Fraction(x) for x in row]
    scale = 1
    for x in row:
        scale = lcm(scale, x.denominator)
    return [x.numerator * (scale // x.denominator) for x in row]


def _reduce(row):
    g = 0
    for x in row:
        g = gcd(g, x)
        if g == 1:
            return row
    if g > 1:
        return [x // g for x in row]
    return row


def primitive_row(row):
    """Integer row proportional (by a positive factor) to ``row`` with gcd 1."""
    return tuple(_reduce(integer_row(row)))


def _echelon(rows, ncols):
    """Fraction-free forward elimination in place; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        pv = pr[c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = _reduce([pv * x - f * y for x, y in zip(rows[i], pr)])
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(A):
    rows = [integer_row(r) for r in A]
    if not rows:
        return 0
    return len(_echelon(rows, len(rows[0])))


def solve_square(A, b):
    """Unique solution of ``A x = b`` for square ``A``; raises :class:`Singular`."""
    d = len(A)
    rows = [integer_row(list(r) + [bi]) for r, bi in zip(A, b)]
    if any(len(r) != d + 1 for r in rows):
        raise ValueError("solve_square needs a square matrix")
    pivots = _echelon(rows, d)
    if len(pivots) < d:
        raise Singular("matrix is singular")
    x = [Fraction(0)] * d
    for i in range(d - 1, -1, -1):
        row = rows[i]
        acc = Fraction(row[d])
        for j in range(i + 1, d):
            acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return tuple(x)


def homogeneous_feasible(equalities=(), nonstrict=(), strict=()):
    """Is there ``u`` with ``e.u = 0``, ``g.u <= 0`` and ``s.u < 0`` for all rows?

    Decided exactly by substitution for the equalities followed by
    Fourier-Motzkin elimination (which is exact for mixed strict systems).
    """
    eqs = [list(primitive_row(e)) for e in equalities]
    ineqs = {}

    def add(row, is_strict, store):
        row = tuple(_reduce(row))
        store[row] = store.get(row, False) or is_strict

    for g in nonstrict:
        add(integer_row(g), False, ineqs)
    for s in strict:
        add(integer_row(s), True, ineqs)
    if not ineqs:
        return True
    ncols = len(next(iter(ineqs)))

    # equalities: eliminate one variable each
    while eqs:
        e = eqs.pop()
        j = next((k for k, x in enumerate(e) if x), None)
        if j is None:
            continue
        ej = e[j]
        sgn = 1 if ej > 0 else -1
        eqs = [_reduce([abs(ej) * x - sgn * r[j] * y for x, y in zip(r, e)]) for r in eqs]
        new = {}
        for r, st in ineqs.items():
            if r[j]:
                r = [abs(ej) * x - sgn * r[j] * y for x, y in zip(r, e)]
            add(r, st, new)
        ineqs = new

    remaining = set(range(ncols))
    while True:
        zero_rows = {r: st for r, st in ineqs.items() if not any(r)}
        if any(zero_rows.values()):
            return False
        ineqs = {r: st for r, st in ineqs.items() if any(r)}
        if not ineqs:
            return True
        live = [c for c in remaining if any(r[c] for r in ineqs)]
        if not live:
            return True

        def cost(c):
            pos = sum(1 for r in ineqs if r[c] > 0)
            return pos * (sum(1 for r in ineqs if r[c] < 0)) - pos

        c = min(live, key=cost)
        remaining.discard(c)
        pos = [(r, st) for r, st in ineqs.items() if r[c] > 0]
        neg = [(r, st) for r, st in ineqs.items() if r[c] < 0]
        new = {}
        for r, st in ineqs.items():
            if r[c] == 0:
                add(r, st, new)
        for p, ps in pos:
            for q, qs in neg:
                add([-q[c] * x + p[c] * y for x, y in zip(p, q)], ps or qs, new)
        ineqs = new


def cone_feasible(constraints):
    """Is there a direction ``u`` with ``sign(normal . u) == s`` for every
    ``(normal, s)`` pair, ``s`` in ``{-1, 0, 1}``?"""
    eqs, strict = [], []
    for normal, s in constraints:
        if s == 0:
            eqs.append(normal)
        elif s > 0:
            strict.append([-Fraction(x) for x in normal])
        else:
            strict.append(normal)
    if not strict:
        return True
    # independent normals: every sign pattern is realised
    normals = eqs + strict
    if len(normals) <= len(normals[0]) and rank(normals) == len(normals):
        return True
    return homogeneous_feasible(equalities=eqs, strict=strict)
