"""Independent reference implementations used by the tests.

None of these share code with the package: they use exact rationals
(sympy), high-precision floats (mpmath), recursive definitions instead of
closed-form sums, and brute-force enumeration.
"""

from fractions import Fraction
from itertools import combinations, permutations

import mpmath
import numpy as np
import sympy as sp

mpmath.mp.dps = 50


def divided_difference_recursive(f, xs):
    """Textbook recursion ``[x0..xn] = ([x1..xn] - [x0..x(n-1)]) / (xn - x0)`` in mpmath."""
    xs = [mpmath.mpf(x) for x in xs]
    if len(xs) == 1:
        return f(xs[0])
    return (divided_difference_recursive(f, xs[1:]) - divided_difference_recursive(f, xs[:-1])) / (xs[-1] - xs[0])


def divided_difference_exact(expr, var, xs):
    """Exact divided difference of a sympy expression at rational nodes."""
    xs = [sp.Rational(x) for x in xs]
    if len(xs) == 1:
        return expr.subs(var, xs[0])
    return sp.simplify(
        (divided_difference_exact(expr, var, xs[1:]) - divided_difference_exact(expr, var, xs[:-1])) / (xs[-1] - xs[0])
    )


def difference_operator(g, h):
    """``(D_h g)(x) = g(x + h) - g(x)``; ``x`` and ``h`` may be vectors or matrices."""
    return lambda x: g(x + h) - g(x)


def iterated(g, steps):
    for h in steps:
        g = difference_operator(g, h)
    return g


def perm_sign(p):
    """Sign from the cycle decomposition."""
    seen, sign = set(), 1
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def immanant_bruteforce(a, weight):
    n = len(a)
    total = Fraction(0) if isinstance(a[0][0], Fraction) else 0.0
    for p in permutations(range(n)):
        term = weight(p)
        for i in range(n):
            term *= a[i][p[i]]
        total += term
    return total


def det_exact(a):
    return sp.Matrix(a).det()


def esym_charpoly(a, k):
    """``e_k`` from the characteristic polynomial of an exact rational matrix."""
    m = sp.Matrix(a)
    lam = sp.Symbol("lam")
    coeffs = sp.Poly(m.charpoly(lam).as_expr(), lam).all_coeffs()
    return (-1) ** k * coeffs[k]


def principal_minor_sum(a, k):
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if k == 0:
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(sum(np.linalg.det(a[np.ix_(s, s)]) for s in combinations(range(n), k)))


def kron_by_index(a, b):
    """Kronecker product from the index formula ``(i*p + k, j*q + l) -> a[i,j] b[k,l]``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    m, n = a.shape
    p, q = b.shape
    out = np.empty((m * p, n * q))
    for i in range(m):
        for j in range(n):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = a[i, j] * b[k, l]
    return out


def bernstein_exact(f, m, x):
    """Bernstein polynomial with exact binomials in mpmath."""
    x = mpmath.mpf(x)
    return sum(mpmath.binomial(m, i) * x**i * (1 - x) ** (m - i) * f(mpmath.mpf(i) / m) for i in range(m + 1))


def rational_gram(rng, n, width=None, lo=-3, hi=4):
    """Integer Gram matrix as nested Fractions (exactly PSD)."""
    g = rng.integers(lo, hi, size=(n, n if width is None else width))
    a = g @ g.T
    return [[Fraction(int(v)) for v in row] for row in a]


def to_float(a):
    return np.array([[float(v) for v in row] for row in a])


def matsum(*ms):
    n = len(ms[0])
    return [[sum(m[i][j] for m in ms) for j in range(n)] for i in range(n)]
