"""Difference operators and alternating subset sums on the cone R_+^N.

Complete monotonicity is probed with iterated differences
``(-1)^k D_v1 ... D_vk f(x)`` instead of directional derivatives; for smooth
functions the two have the same sign pattern and differences avoid
numerical differentiation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Callable, Sequence

import numpy as np

from ._common import DEFAULT_TOL, Verdict, select_witness, signed_fsum, subsets
from .errors import DegenerateInput, DomainError
from .scalar import FunctionSpec, MIN_SPACING, evaluate_array

BOUNDARY_MARGIN = 1e-3
MAX_CM_ORDER = 4


@dataclass(frozen=True)
class ConePoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.coords))
        if not c:
            raise DomainError("a cone point needs at least one coordinate")
        if any(not v >= 0 for v in c):
            raise DomainError(f"cone point has a negative coordinate: {c}")
        object.__setattr__(self, "coords", c)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)

    def __len__(self):
        return len(self.coords)


def _as_points(points) -> np.ndarray:
    arr = np.array([np.asarray(p, dtype=float).ravel() for p in points], dtype=float)
    if arr.size and np.any(arr < 0):
        raise DomainError("cone points must have nonnegative coordinates")
    return arr


@dataclass(frozen=True)
class MultiFunctionSpec:
    """A named function on the cone.

    ``fn`` maps an array of shape ``(..., N)`` to shape ``(...)``.  When
    ``open_boundary`` is set the function is only defined on the open cone.
    ``dim`` is ``None`` for functions defined in every dimension.
    """

    id: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    dim: int | None = None
    open_boundary: bool = False
    closed_extension: bool = True
    params: tuple = ()
    notes: tuple[str, ...] = ()

    def __call__(self, x):
        return float(evaluate_points(self, np.asarray(x, dtype=float)[None, :])[0])


def evaluate_points(f: MultiFunctionSpec, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if f.dim is not None and pts.shape[-1] != f.dim:
        raise DomainError(f"{f.id} takes {f.dim} coordinates, got {pts.shape[-1]}")
    if np.any(pts < 0) or (f.open_boundary and np.any(pts <= 0)):
        raise DomainError(f"{f.id}: argument outside its cone")
    with np.errstate(all="ignore"):
        out = np.asarray(f.fn(pts), dtype=float)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{f.id}: non-finite value")
    return out


def frechet_min() -> MultiFunctionSpec:
    return MultiFunctionSpec("min", lambda p: np.min(p, axis=-1), 2, notes=("concave", "positive differences of order 2"))


def neg_sqrt_product() -> MultiFunctionSpec:
    return MultiFunctionSpec(
        "neg-sqrt-product", lambda p: -2.0 * np.sqrt(p[..., 0] * p[..., 1]), 2,
        notes=("convex", "fails order-2 positive differences"),
    )


def composed(f: FunctionSpec, w: Sequence[float]) -> MultiFunctionSpec:
    """``x -> f(<x, w>)`` for a scalar catalog function and a weight in the cone."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise DomainError("weight vector must lie in the cone")
    return MultiFunctionSpec(
        f"{f.id}o<.,{tuple(w.tolist())}>",
        lambda p: evaluate_array(f, p @ w),
        w.size,
        params=(("w", tuple(w.tolist())),),
    )


def riesz_kernel(alphas: Sequence[float]) -> MultiFunctionSpec:
    a = np.asarray(alphas, dtype=float)
    if np.any(a <= 0):
        raise DomainError("Riesz exponents must be positive")
    return MultiFunctionSpec(
        f"riesz{tuple(a.tolist())}",
        lambda p: np.exp(-(np.log(p) @ a)),
        a.size,
        open_boundary=True,
        closed_extension=False,
        params=(("alphas", tuple(a.tolist())),),
        notes=("completely-monotone",),
    )


def exp_linear(y: Sequence[float]) -> MultiFunctionSpec:
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("exponent vector must lie in the cone")
    return MultiFunctionSpec(
        f"exp-<{tuple(y.tolist())},.>",
        lambda p: np.exp(-(p @ y)),
        y.size,
        params=(("y", tuple(y.tolist())),),
        notes=("completely-monotone",),
    )


# operators -----------------------------------------------------------------

def _corner_sums(base: np.ndarray, steps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = steps.shape[0]
    eps = np.array(list(product((0, 1), repeat=k)), dtype=float).reshape(-1, k)
    signs = (-1.0) ** (k - eps.sum(axis=1))
    return base + eps @ steps.reshape(k, -1), signs


def cone_iterated_difference_terms(f: MultiFunctionSpec, base, steps) -> tuple[float, float]:
    b = _as_points([base])[0]
    st = _as_points(steps) if len(steps) else np.zeros((0, b.size))
    pts, signs = _corner_sums(b, st)
    vals = evaluate_points(f, pts)
    return signed_fsum(vals.tolist(), signs.tolist())


def cone_iterated_difference(f: MultiFunctionSpec, base, steps) -> float:
    """``D_h1 ... D_hk f(base)`` for steps in the cone."""
    return cone_iterated_difference_terms(f, base, steps)[0]


def sz_alternating_sum_terms(f: MultiFunctionSpec, points) -> tuple[float, float]:
    pts = _as_points(points)
    sums, signs = [], []
    for s in subsets(len(pts), include_empty=False):
        sums.append(pts[list(s)].sum(axis=0))
        signs.append(1 if len(s) % 2 else -1)
    vals = evaluate_points(f, np.array(sums))
    return signed_fsum(vals.tolist(), signs)


def sz_alternating_sum(f: MultiFunctionSpec, points) -> float:
    """``sum f(xi) - sum f(xi + xj) + ... + (-1)^(n-1) f(x1 + ... + xn)``."""
    return sz_alternating_sum_terms(f, points)[0]


def sz_bounds(f: MultiFunctionSpec, points) -> tuple[float, float, float]:
    """Lower margin, upper margin and scale of the double bound ``0 <= S <= f(0)``.

    The upper margin ``f(0) - S`` is ``inf`` when ``f`` has no continuous
    extension to the closed cone.
    """
    s, scale = sz_alternating_sum_terms(f, points)
    if not f.closed_extension:
        return s, math.inf, scale
    pts = _as_points(points)
    f0 = float(evaluate_points(f, np.zeros((1, pts.shape[1])))[0])
    return s, f0 - s, max(scale, abs(f0))


def bernstein_pq_values(alphas: Sequence[float]) -> tuple[float, float]:
    """The alternating sums of ``exp(-sum_S alpha)`` and of ``1 - exp(-sum_S alpha)``."""
    a = np.asarray(alphas, dtype=float)
    if a.size < 2:
        raise ValueError("need at least two exponents")
    if np.any(a < 0):
        raise DomainError("exponents must be nonnegative")
    p_terms, q_terms, signs = [], [], []
    for s in subsets(a.size, include_empty=False):
        t = math.fsum(a[list(s)])
        p_terms.append(math.exp(-t))
        q_terms.append(-math.expm1(-t))
        signs.append(1 if len(s) % 2 else -1)
    return signed_fsum(p_terms, signs)[0], signed_fsum(q_terms, signs)[0]


def bernstein_pq_closed_form(alphas: Sequence[float]) -> tuple[float, float]:
    """``P = 1 - prod(1 - e^-a)`` and ``Q = prod(1 - e^-a)``."""
    a = [float(v) for v in alphas]
    if any(v == 0.0 for v in a):
        return 1.0, 0.0
    log_q = math.fsum(math.log1p(-math.exp(-v)) for v in a)
    return -math.expm1(log_q), math.prod(-math.expm1(-v) for v in a)


# probes --------------------------------------------------------------------

def cm_difference_probe(
    f: MultiFunctionSpec,
    region: Sequence[tuple[float, float]],
    max_order: int = 3,
    grid: int = 16,
    random_directions: int = 4,
    seed: int = 0,
    max_bases: int = 4096,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Minimum of ``(-1)^k D_v1 ... D_vk f(x)`` for ``1 <= k <= max_order``.

    Bases come from a uniform grid on the box ``region`` (one ``(lo, hi)``
    pair per coordinate).  Steps are axis-aligned (one grid cell and half
    the box side) plus ``random_directions`` seeded directions inside the
    cone.  The witness is ``(x, steps)`` and ``Verdict.order`` is ``k``.
    """
    box = np.asarray(region, dtype=float).reshape(-1, 2)
    dim = box.shape[0]
    if not 1 <= max_order <= MAX_CM_ORDER:
        raise ValueError(f"max_order must be in 1..{MAX_CM_ORDER}")
    if np.any(box[:, 0] < 0) or np.any(box[:, 1] <= box[:, 0]):
        raise DomainError("region must be a nonempty box inside the cone")
    if f.open_boundary and np.any(box[:, 0] < BOUNDARY_MARGIN):
        raise DomainError(f"{f.id} is only probed on boxes with coordinates >= {BOUNDARY_MARGIN:g}")
    rng = np.random.default_rng(seed)
    axes = [np.linspace(lo, hi, grid) for lo, hi in box]
    if grid**dim <= max_bases:
        bases = np.array(list(product(*axes)), dtype=float)
    else:
        bases = rng.uniform(box[:, 0], box[:, 1], size=(max_bases, dim))
    side = box[:, 1] - box[:, 0]
    steps = []
    for i in range(dim):
        for length in (side[i] / (grid - 1), side[i] / 2):
            v = np.zeros(dim)
            v[i] = length
            steps.append(v)
    for _ in range(random_directions):
        d = rng.uniform(0.0, 1.0, dim)
        steps.append(d / np.linalg.norm(d) * np.mean(side) * rng.uniform(0.1, 1.0))
    steps = np.array(steps)

    best = None
    total_fail, total = 0, 0
    for k in range(1, max_order + 1):
        combos = np.array(list(combinations_with_replacement(range(len(steps)), k)), dtype=np.intp)
        eps = np.array(list(product((0, 1), repeat=k)), dtype=float)
        signs = (-1.0) ** (k - eps.sum(axis=1))
        corners = np.einsum("ek,ckd->ced", eps, steps[combos])  # (C, 2^k, dim)
        pts = bases[:, None, None, :] + corners[None, :, :, :]
        vals = evaluate_points(f, pts.reshape(-1, dim)).reshape(len(bases), len(combos), -1)
        margins = ((-1.0) ** k * (vals @ signs)).ravel()
        scales = np.max(np.abs(vals), axis=2).ravel()
        i, nfail = select_witness(margins, scales, tol)
        total_fail += nfail
        total += margins.size
        bi, ci = divmod(i, len(combos))
        cand = (margins[i], scales[i], nfail, k, bases[bi], steps[combos[ci]])
        if best is None or _worse(cand, best, tol):
            best = cand
    m, s, _, k, x, st = best
    return Verdict(
        float(m), (tuple(x.tolist()), tuple(tuple(v.tolist()) for v in st)),
        total_fail == 0, float(s), tol, total_fail, total, k,
    )


def _worse(cand, best, tol) -> bool:
    c_fail = cand[0] < -tol * cand[1]
    b_fail = best[0] < -tol * best[1]
    if c_fail != b_fail:
        return c_fail
    return cand[0] < best[0]


# double divided differences ------------------------------------------------

def _weights(pts: np.ndarray) -> list[float]:
    out = []
    for j in range(pts.size):
        w = 1.0
        for k in range(pts.size):
            if k != j:
                w *= pts[j] - pts[k]
        out.append(1.0 / w)
    return out


def _check(pts: np.ndarray) -> None:
    if pts.size < 2:
        return
    srt = np.sort(pts)
    span = srt[-1] - srt[0]
    if span <= 0 or np.min(np.diff(srt)) < MIN_SPACING * span:
        raise DegenerateInput("points closer than the minimum spacing")


def double_divided_difference(xs: Sequence[float], ys: Sequence[float], f: Callable[[float, float], float]) -> float:
    """Divided double difference of order ``(m, n)``.

    Computed as the exactly rounded sum of ``c_i d_j f(x_i, y_j)`` over the
    sorted nodes, so applying the x- or y-difference first gives the same
    floating-point result.
    """
    x = np.sort(np.asarray(xs, dtype=float))
    y = np.sort(np.asarray(ys, dtype=float))
    _check(x)
    _check(y)
    cx, cy = _weights(x), _weights(y)
    terms = [(cx[i] * cy[j]) * float(f(x[i], y[j])) for i in range(x.size) for j in range(y.size)]
    return math.fsum(terms)


def double_divided_difference_nested(xs, ys, f, first: str = "x") -> float:
    """Nested route: a divided difference of divided differences."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    _check(x)
    _check(y)

    def dd(pts, vals):
        return math.fsum(v * w for v, w in zip(vals, _weights(pts)))

    if first == "x":
        return dd(y, [dd(x, [f(xi, yj) for xi in x]) for yj in y])
    if first == "y":
        return dd(x, [dd(y, [f(xi, yj) for yj in y]) for xi in x])
    raise ValueError("first must be 'x' or 'y'")
