"""Divided differences, iterated differences and higher-order convexity
probes for real functions of one variable.

A function ``f`` is *n-convex* on an interval when every divided difference
``[x0, ..., xn; f]`` over distinct points is nonnegative, and it has
*positive differences of order n* when ``D_h1 ... D_hn f(t) >= 0`` for all
nonnegative steps.  For continuous functions on an interval the two
properties coincide; the probes below sample both on matched grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from ._common import DEFAULT_TOL, Verdict, select_witness, signed_fsum
from ._kernels import newton_divdiff_batch
from .errors import DegenerateInput, DomainError, SingularityError

MIN_SPACING = 1e-6
SINGULARITY_WINDOW = 1e-12
DEFAULT_GRID = 16


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        left = x >= self.lo if self.lo_closed else x > self.lo
        right = x <= self.hi if self.hi_closed else x < self.hi
        return left & right

    def __str__(self):
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


REALS = Interval(-math.inf, math.inf, False, False)
NONNEG = Interval(0.0, math.inf, True, False)
POSITIVE = Interval(0.0, math.inf, False, False)


@dataclass(frozen=True)
class FunctionSpec:
    """A named real function with its domain.

    ``fn`` must accept and return numpy arrays.  ``probe_interval`` is the
    default interval used by the probes and by the campaign samplers.
    """

    id: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    domain: Interval = REALS
    probe_interval: tuple[float, float] = (0.0, 1.0)
    notes: tuple[str, ...] = ()
    params: tuple[tuple[str, float], ...] = ()

    def __call__(self, x):
        return eval_function(self, x)


def eval_function(f: FunctionSpec, x: float) -> float:
    """Evaluate ``f`` at a single point, enforcing its domain."""
    return float(evaluate_array(f, np.asarray([x], dtype=float))[0])


def evaluate_array(f: FunctionSpec, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if not np.all(f.domain.contains(xs)):
        bad = xs[~f.domain.contains(xs)].ravel()[0]
        raise DomainError(f"{f.id}: {bad!r} outside domain {f.domain}")
    with np.errstate(all="ignore"):
        out = np.asarray(f.fn(xs), dtype=float)
    if not np.all(np.isfinite(out)):
        bad = xs[~np.isfinite(out)].ravel()[0]
        raise SingularityError(f"{f.id}: non-finite value at {bad!r}")
    return out


# catalog -------------------------------------------------------------------

def _xm1_over_log(x):
    d = x - 1.0
    out = d / np.log1p(d)
    out = np.where(np.abs(d) < SINGULARITY_WINDOW, 1.0, out)
    return np.where(x == 0.0, 0.0, out)


def _neg_xlogx(x):
    safe = np.where(x > 0, x, 1.0)
    return np.where(np.abs(x) < SINGULARITY_WINDOW, 0.0, -safe * np.log(safe))


def power(alpha: float = 0.5) -> FunctionSpec:
    alpha = float(alpha)
    notes = []
    if 0 < alpha <= 1:
        notes += ["bernstein", "3-convex"]
    if alpha >= 2:
        notes.append("3-convex")
    return FunctionSpec(
        f"power(alpha={alpha!r})",
        lambda x: np.power(x, alpha),
        NONNEG if alpha > 0 else POSITIVE,
        (0.0, 4.0) if alpha > 0 else (0.5, 4.0),
        tuple(notes),
        (("alpha", alpha),),
    )


def exp_neg(alpha: float = 1.0) -> FunctionSpec:
    alpha = float(alpha)
    return FunctionSpec(
        f"exp-neg(alpha={alpha!r})",
        lambda x: np.exp(-alpha * x),
        REALS,
        (0.0, 4.0),
        ("completely-monotone",),
        (("alpha", alpha),),
    )


def one_minus_exp_neg(alpha: float = 1.0) -> FunctionSpec:
    alpha = float(alpha)
    return FunctionSpec(
        f"one-minus-exp-neg(alpha={alpha!r})",
        lambda x: -np.expm1(-alpha * x),
        REALS,
        (0.0, 4.0),
        ("bernstein",),
        (("alpha", alpha),),
    )


def polynomial(coeffs: Sequence[float], name: str | None = None, probe_interval=(0.0, 1.0)) -> FunctionSpec:
    """Polynomial with ``coeffs[i]`` the coefficient of ``x**i``."""
    c = tuple(float(v) for v in coeffs)
    rev = c[::-1]
    return FunctionSpec(
        name or f"poly{c}",
        lambda x: np.polyval(rev, x),
        REALS,
        probe_interval,
        (),
        tuple((f"c{i}", v) for i, v in enumerate(c)),
    )


def _cubic_shift(x):
    d = x - 3.0
    return 1.0 - d + d**3 / 6.0


_BUILTIN = [
    FunctionSpec("abs", np.abs, REALS, (-2.0, 2.0), ("convex",)),
    FunctionSpec("exp", np.exp, REALS, (0.0, 2.0), ("absolutely-monotone",)),
    FunctionSpec("x-over-1px", lambda x: x / (x + 1.0), Interval(-1.0, math.inf, False, False), (0.0, 4.0), ("bernstein",)),
    FunctionSpec("log1p", np.log1p, Interval(-1.0, math.inf, False, False), (0.0, 4.0), ("bernstein",)),
    FunctionSpec("xm1-over-logx", _xm1_over_log, NONNEG, (0.0, 4.0), ("bernstein",)),
    FunctionSpec("neg-xlogx", _neg_xlogx, NONNEG, (0.0, 4.0), ("3-convex",)),
    FunctionSpec("sinh", np.sinh, REALS, (0.0, 3.0), ("3-convex",)),
    FunctionSpec("cosh", np.cosh, REALS, (0.0, 3.0), ("3-convex",)),
    FunctionSpec("neg-lgamma", lambda x: -gammaln(x), POSITIVE, (0.5, 4.0), ("3-convex",)),
    FunctionSpec("sqrt-minus-square", lambda x: np.sqrt(x) - x * x, NONNEG, (0.0, 4.0), ("3-convex",)),
    FunctionSpec("cubic-shift", _cubic_shift, REALS, (0.0, 6.0), ("3-convex", "not 0-, 1- or 2-convex")),
    polynomial((0.0, 0.0, 1.0), "square"),
    polynomial((0.0, 0.0, 0.0, 1.0), "cube"),
    polynomial((0.0, 0.0, -1.0), "neg-square"),
]

_FACTORIES = {
    "power": power,
    "exp-neg": exp_neg,
    "one-minus-exp-neg": one_minus_exp_neg,
}

CATALOG: dict[str, FunctionSpec] = {f.id: f for f in _BUILTIN}
for _name, _factory in _FACTORIES.items():
    CATALOG[_name] = _factory()


def get_function(name: str, **params) -> FunctionSpec:
    """Look up a catalog function; parametric families accept keyword params."""
    if name in _FACTORIES:
        return _FACTORIES[name](**params)
    if name == "poly":
        return polynomial(params["coeffs"])
    try:
        return CATALOG[name]
    except KeyError:
        raise DomainError(f"unknown function {name!r}") from None


# divided differences -------------------------------------------------------

def _check_spacing(points: np.ndarray) -> None:
    if points.size < 2:
        return
    srt = np.sort(points)
    span = srt[-1] - srt[0]
    gap = np.min(np.diff(srt))
    if span <= 0 or gap < MIN_SPACING * span:
        raise DegenerateInput(f"points closer than {MIN_SPACING:g} x span: min gap {gap!r}")


def _product_form(xs: np.ndarray, fx: np.ndarray) -> tuple[float, float]:
    n = xs.size
    terms = []
    for j in range(n):
        w = 1.0
        for k in range(n):
            if k != j:
                w *= xs[j] - xs[k]
        terms.append(fx[j] / w)
    return signed_fsum(terms, [1] * n)


def divided_difference_terms(f: FunctionSpec, points: Sequence[float]) -> tuple[float, float]:
    """Product-form divided difference and the largest absolute term."""
    xs = np.sort(np.asarray(points, dtype=float))
    _check_spacing(xs)
    return _product_form(xs, evaluate_array(f, xs))


def divided_difference(f: FunctionSpec, points: Sequence[float], method: str = "product") -> float:
    """``[x0, ..., xn; f]``.

    ``method="product"`` sums ``f(xj) / prod_{k != j} (xj - xk)`` over the
    sorted points, so the result does not depend on the order of
    ``points``.  ``method="recursive"`` runs the Newton table on the points
    in the order given.
    """
    if method == "product":
        return divided_difference_terms(f, points)[0]
    if method == "recursive":
        xs = np.asarray(points, dtype=float)
        _check_spacing(xs)
        fx = evaluate_array(f, xs)
        return float(newton_divdiff_batch(xs[None, :], fx[None, :])[0])
    raise ValueError(f"unknown method {method!r}")


def _product_form_batch(xs: np.ndarray, fx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diff = xs[:, :, None] - xs[:, None, :]
    m = xs.shape[1]
    diff[:, np.arange(m), np.arange(m)] = 1.0
    terms = fx / np.prod(diff, axis=2)
    return terms.sum(axis=1), np.max(np.abs(terms), axis=1)


# iterated differences ------------------------------------------------------

def _corner_signs(n: int) -> tuple[np.ndarray, np.ndarray]:
    eps = np.array(list(product((0, 1), repeat=n)), dtype=float).reshape(2**n, n)
    signs = (-1.0) ** (n - eps.sum(axis=1))
    return eps, signs


def iterated_difference_terms(f: FunctionSpec, base: float, steps: Sequence[float]) -> tuple[float, float]:
    steps = np.asarray(steps, dtype=float)
    if np.any(steps < 0):
        raise DomainError("difference steps must be nonnegative")
    eps, signs = _corner_signs(steps.size)
    pts = base + eps @ steps if steps.size else np.array([float(base)])
    vals = evaluate_array(f, pts)
    return signed_fsum(vals.tolist(), signs.tolist())


def iterated_difference(f: FunctionSpec, base: float, steps: Sequence[float]) -> float:
    """``D_h1 ... D_hn f(base)`` as the alternating sum over ``{0,1}^n``."""
    return iterated_difference_terms(f, base, steps)[0]


def popoviciu_sum(f: FunctionSpec, xs: Sequence[float]) -> float:
    """Alternating sum including the ``f(0)`` term; nonnegative for n-convex f."""
    return iterated_difference(f, 0.0, xs)


# probes --------------------------------------------------------------------

def _probe_grid(f: FunctionSpec, interval, n: int, grid: int) -> tuple[float, float, np.ndarray]:
    a, b = (f.probe_interval if interval is None else interval)
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError(f"empty interval [{a}, {b}]")
    if n < 0:
        raise ValueError("order must be nonnegative")
    if grid < n + 1:
        raise ValueError(f"grid of {grid} points cannot hold {n + 1} distinct points")
    if not np.all(f.domain.contains([a, b])):
        raise DomainError(f"[{a}, {b}] not inside domain {f.domain} of {f.id}")
    return a, b, np.linspace(a, b, grid)


def n_convexity_probe(
    f: FunctionSpec,
    interval: tuple[float, float] | None = None,
    n: int = 2,
    grid: int = DEFAULT_GRID,
    random_tuples: int = 0,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Minimum n-th divided difference over all (n+1)-subsets of a uniform grid."""
    a, b, xs = _probe_grid(f, interval, n, grid)
    fx = evaluate_array(f, xs)
    idx = np.array(list(combinations(range(xs.size), n + 1)), dtype=np.intp)
    pts, vals = xs[idx], fx[idx]
    margins, scales = _product_form_batch(pts, vals)
    if random_tuples:
        rng = np.random.default_rng(seed)
        rp = np.sort(rng.uniform(a, b, size=(random_tuples, n + 1)), axis=1)
        span = rp[:, -1] - rp[:, 0]
        ok = np.all(np.diff(rp, axis=1) >= MIN_SPACING * (b - a), axis=1) & (span > 0) if n else np.ones(len(rp), bool)
        rp = rp[ok]
        rm, rs = _product_form_batch(rp, evaluate_array(f, rp))
        pts = np.vstack([pts, rp])
        margins, scales = np.concatenate([margins, rm]), np.concatenate([scales, rs])
    i, nfail = select_witness(margins, scales, tol)
    return Verdict(
        float(margins[i]), tuple(float(v) for v in pts[i]), nfail == 0, float(scales[i]),
        tol, nfail, int(margins.size), n,
    )


def _grid_step_tuples(n: int, npts: int) -> np.ndarray:
    """Rows ``(t, m1, ..., mn)`` with ``1 <= m1 <= ... <= mn`` and ``t + sum(m) <= npts - 1``."""
    last = npts - 1
    rows = []
    for ms in combinations_with_replacement(range(1, last + 1), n):
        room = last - sum(ms)
        if room < 0:
            continue
        for t in range(room + 1):
            rows.append((t, *ms))
    return np.array(rows, dtype=np.intp).reshape(-1, n + 1)


def positive_difference_probe(
    f: FunctionSpec,
    interval: tuple[float, float] | None = None,
    n: int = 2,
    grid: int = DEFAULT_GRID,
    random_tuples: int = 0,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Minimum of ``D_h1 ... D_hn f(t)`` over grid bases and positive grid steps.

    Every point touched is a grid node, so the probe sees exactly the
    function values that :func:`n_convexity_probe` sees on the same grid.
    The witness is ``(base, steps)``.
    """
    a, b, xs = _probe_grid(f, interval, n, grid)
    h = (b - a) / (xs.size - 1)
    fx = evaluate_array(f, xs)
    rows = _grid_step_tuples(n, xs.size)
    eps, signs = _corner_signs(n)
    offs = rows[:, :1] + (eps.astype(np.intp) @ rows[:, 1:].T).T
    vals = fx[offs]
    margins = vals @ signs
    scales = np.max(np.abs(vals), axis=1)
    witnesses = [(float(xs[r[0]]), tuple(float(m * h) for m in r[1:])) for r in rows]
    if random_tuples:
        rng = np.random.default_rng(seed)
        for _ in range(random_tuples):
            w = rng.dirichlet(np.ones(n + 1)) * (b - a) * rng.uniform()
            base, steps = a + w[0], w[1:]
            m, s = iterated_difference_terms(f, base, steps)
            margins = np.append(margins, m)
            scales = np.append(scales, s)
            witnesses.append((float(base), tuple(float(v) for v in steps)))
    i, nfail = select_witness(margins, scales, tol)
    return Verdict(
        float(margins[i]), witnesses[i], nfail == 0, float(scales[i]),
        tol, nfail, int(margins.size), n,
    )


# Bernstein polynomials -----------------------------------------------------

def _de_casteljau(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    b = np.repeat(coeffs[:, None], x.size, axis=1)
    for r in range(1, coeffs.size):
        b = (1.0 - x) * b[:-1] + x * b[1:]
    return b[0]


def bernstein_poly(f: FunctionSpec, m: int, x) -> float | np.ndarray:
    """``B_m(f)(x) = sum_i C(m, i) x^i (1 - x)^(m - i) f(i / m)``.

    Evaluated with de Casteljau's recurrence, which only forms convex
    combinations and stays stable for large ``m``.
    """
    if m < 1:
        raise ValueError("degree must be at least 1")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xa < 0) | (xa > 1)):
        raise DomainError("Bernstein polynomials are evaluated on [0, 1]")
    coeffs = evaluate_array(f, np.arange(m + 1) / m)
    out = _de_casteljau(coeffs, xa)
    return float(out[0]) if np.ndim(x) == 0 else out


def bernstein_function(f: FunctionSpec, m: int) -> FunctionSpec:
    """``B_m(f)`` wrapped as a :class:`FunctionSpec` on ``[0, 1]``."""
    coeffs = evaluate_array(f, np.arange(m + 1) / m)
    return FunctionSpec(
        f"bernstein({f.id}, m={m})",
        lambda x: _de_casteljau(coeffs, np.atleast_1d(x)).reshape(np.shape(x)),
        Interval(0.0, 1.0),
        (0.0, 1.0),
    )
