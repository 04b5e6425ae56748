"""Signed margins for the determinant, immanant and tensor-power inequalities.

Scalar evaluators return the margin ``left - right`` as a float; operator
evaluators return a :class:`~hhverify.matrix.LoewnerMargin`.  The
``*_terms`` variants also return the scale used by the tolerance policy
(largest absolute summand, or largest operand spectral radius for Löwner
margins; polynomial functionals of degree d also include ``rho^d``).  Subset sums are enumerated by increasing size and then
lexicographically, and accumulated with compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from ._common import DEFAULT_TOL, compensated_sum, signed_fsum, subsets
from .errors import (
    DimensionMismatch,
    HypothesisViolation,
    NegativeDeterminant,
    SingularMatrix,
    SizeLimit,
)
from .matrix import (
    MAX_IMMANANT_DIM,
    SIGN,
    CharacterSpec,
    LoewnerMargin,
    MatrixLike,
    _check_tensor_size,
    as_array,
    common_dim,
    det_stack,
    esym_from_eigenvalues,
    immanant,
    kron_power,
    mixed_kron,
)

SINGULAR_RATIO = 1e-12
MAX_SK_TERMS = 6
_EPS = np.finfo(float).eps


def _arrays(*mats: MatrixLike) -> list[np.ndarray]:
    arrs = [as_array(m) for m in mats]
    common_dim(*arrs)
    return arrs


def _subset_sums(As: Sequence[np.ndarray], X: np.ndarray | None):
    """Yield ``(subset, sum_{i in S} A_i + X)`` for every subset, empty first."""
    zero = np.zeros_like(As[0]) if X is None else X
    for s in subsets(len(As)):
        total = zero
        for i in s:
            total = total + As[i]
        yield s, total


# generic alternating sums ----------------------------------------------------

@dataclass(frozen=True)
class AlternatingSumSpec:
    """``sum_S (-1)^(n - |S|) g(sum_{i in S} A_i + X)`` over all subsets ``S``.

    ``functional`` maps a stack of matrices of shape ``(m, N, N)`` to ``m``
    values.  With ``X=None`` the base is the zero matrix.  ``degree`` maps
    ``N`` to the homogeneity degree of the functional; when given, the scale
    also covers ``rho(M)^degree`` over the operand sums (see :func:`_scaled`).
    """

    summands: tuple
    base: object = None
    functional: Callable[[np.ndarray], np.ndarray] = None
    name: str = "det"
    degree: Callable[[int], int] | None = None

    def terms(self) -> tuple[float, float]:
        As = _arrays(*self.summands)
        X = None if self.base is None else as_array(self.base)
        if X is not None:
            common_dim(As[0], X)
        n = len(As)
        sets, mats = zip(*_subset_sums(As, X))
        vals = np.asarray(self.functional(np.stack(mats)), dtype=float)
        signs = [(-1) ** (n - len(s)) for s in sets]
        value, scale = signed_fsum(vals.tolist(), signs)
        if self.degree is not None:
            scale = _scaled(scale, mats, self.degree(As[0].shape[0]))
        return value, scale

    def value(self) -> float:
        return self.terms()[0]


def _scaled(scale: float, mats, degree: int) -> float:
    """Widen ``scale`` to ``max rho(M)^degree`` over the operand sums.

    A degree-d functional of ``M`` is evaluated with an error proportional
    to ``rho(M)^d``, not to its value; on rank-deficient operands every term
    is rounding noise and the largest term alone would not bound it.
    """
    if degree == 0:
        return scale
    radii = np.max(np.abs(np.linalg.eigvalsh(np.stack(mats))), axis=1)
    return max(scale, float(np.max(radii)) ** degree)


def _full_degree(n: int) -> int:
    return n


def det_alternating_difference_terms(As: Sequence[MatrixLike], X: MatrixLike) -> tuple[float, float]:
    if len(As) < 1:
        raise ValueError("need at least one difference step")
    return AlternatingSumSpec(tuple(As), X, det_stack, "det", _full_degree).terms()


def det_alternating_difference(As: Sequence[MatrixLike], X: MatrixLike) -> float:
    """``D_A1 ... D_An det (X)``; nonnegative for positive semidefinite inputs."""
    return det_alternating_difference_terms(As, X)[0]


def immanant_alternating_difference_terms(As, X, chi: CharacterSpec = SIGN) -> tuple[float, float]:
    def fn(stack):
        return np.array([immanant(m, chi) for m in stack])

    return AlternatingSumSpec(tuple(As), X, fn, f"imm-{chi.kind}", _full_degree).terms()


# Hornich-Hlawka type scalar margins ----------------------------------------

_HH_PLUS = ((0,), (1,), (2,), (0, 1, 2))
_HH_MINUS = ((0, 1), (1, 2), (0, 2))


def _hh_operands(A, B, C, X=None) -> tuple[list[np.ndarray], list[int]]:
    """The seven (or eight, with a base) operand sums of a three-step difference.

    Sums are accumulated as ``X + A_i + A_j + ...`` in index order, the same
    order :class:`AlternatingSumSpec` uses, so both routes see identical
    matrices.
    """
    ops = [A, B, C]
    mats, signs = [], []
    for idx, sign in [(s, 1) for s in _HH_PLUS] + [(s, -1) for s in _HH_MINUS]:
        total = X
        for i in idx:
            total = ops[i] if total is None else total + ops[i]
        mats.append(total)
        signs.append(sign)
    if X is not None:
        mats.append(X)
        signs.append(-1)
    return mats, signs


def esym_hlawka_terms(A, B, C, k: int) -> tuple[float, float]:
    a, b, c = _arrays(A, B, C)
    n = a.shape[0]
    if not 0 <= k <= n:
        raise IndexError(f"k={k} outside 0..{n}")
    mats, signs = _hh_operands(a, b, c)
    eigs = np.linalg.eigvalsh(np.stack(mats))
    vals = [esym_from_eigenvalues(e)[k] for e in eigs]
    value, scale = signed_fsum(vals, signs)
    if k:
        scale = max(scale, float(np.max(np.abs(eigs))) ** k)
    return value, scale


def esym_hlawka_margin(A, B, C, k: int) -> float:
    """``e_k(A)+e_k(B)+e_k(C)+e_k(A+B+C) - e_k(A+B) - e_k(B+C) - e_k(C+A)``."""
    return esym_hlawka_terms(A, B, C, k)[0]


def det_hlawka_with_base_terms(A, B, C, X) -> tuple[float, float]:
    a, b, c, x = _arrays(A, B, C, X)
    mats, signs = _hh_operands(a, b, c, x)
    value, scale = signed_fsum(det_stack(np.stack(mats)).tolist(), signs)
    return value, _scaled(scale, mats, a.shape[0])


def det_hlawka_with_base_margin(A, B, C, X) -> float:
    """Determinantal Hornich-Hlawka margin with base point ``X`` (and the ``det X`` term)."""
    return det_hlawka_with_base_terms(A, B, C, X)[0]


def immanant_hh_terms(A, B, C, X, chi: CharacterSpec = SIGN) -> tuple[float, float]:
    a, b, c, x = _arrays(A, B, C, X)
    if a.shape[0] > MAX_IMMANANT_DIM:
        raise SizeLimit(f"immanant limited to N <= {MAX_IMMANANT_DIM}")
    mats, signs = _hh_operands(a, b, c, x)
    value, scale = signed_fsum([immanant(m, chi) for m in mats], signs)
    return value, _scaled(scale, mats, a.shape[0])


def immanant_hh_margin(A, B, C, X, chi: CharacterSpec = SIGN) -> float:
    return immanant_hh_terms(A, B, C, X, chi)[0]


# operator (Löwner) margins ---------------------------------------------------

def _loewner(terms: list[np.ndarray], signs: list[int], radii: Sequence[float]) -> LoewnerMargin:
    total = compensated_sum(terms, signs)
    total = (total + total.T) / 2.0
    return LoewnerMargin(float(np.linalg.eigvalsh(total)[0]), float(max(radii)))


def _radii(mats: Sequence[np.ndarray]) -> np.ndarray:
    return np.max(np.abs(np.linalg.eigvalsh(np.stack(mats))), axis=1)


def operator_hh_margin(A, B, C, X, p: int) -> LoewnerMargin:
    """Smallest eigenvalue of the tensor-power Hornich-Hlawka difference.

    ``(x)^p(A+X) + (x)^p(B+X) + (x)^p(C+X) + (x)^p(A+B+C+X)`` minus
    ``(x)^p(A+B+X) + (x)^p(B+C+X) + (x)^p(C+A+X) + (x)^p X``.
    """
    a, b, c, x = _arrays(A, B, C, X)
    if p < 1:
        raise ValueError("p must be >= 1")
    _check_tensor_size(a.shape[0], p)
    mats, signs = _hh_operands(a, b, c, x)
    return _loewner([kron_power(m, p) for m in mats], signs, _radii(mats) ** p)


def lemma_main_margin(X, Y, Z, V, k: int, l: int) -> LoewnerMargin:
    """``X^k V X^l + (X+Y+Z)^k V (X+Y+Z)^l - (X+Y)^k V (X+Y)^l - (X+Z)^k V (X+Z)^l``
    with Kronecker powers; ``X^0`` is the scalar 1."""
    x, y, z, v = _arrays(X, Y, Z, V)
    if k < 0 or l < 0:
        raise ValueError("k and l must be nonnegative")
    _check_tensor_size(x.shape[0], k + l + 1)
    bases = [x, x + y + z, x + y, x + z]
    terms = [mixed_kron(m, k, v, l) for m in bases]
    rv = float(_radii([v])[0])
    radii = [r ** (k + l) * rv for r in _radii(bases)]
    return _loewner(terms, [1, 1, -1, -1], radii)


def tensor_power_derivative(Z, V, p: int) -> np.ndarray:
    """``sum_j Z^j (x) V (x) Z^(p-1-j)``, the directional derivative of ``Z -> (x)^p Z``."""
    z, v = _arrays(Z, V)
    return sum(mixed_kron(z, j, v, p - 1 - j) for j in range(p))


def derivative_formula_check(Z, V, p: int, h: float) -> float:
    """Max-norm gap between the forward difference quotient and the derivative formula."""
    z, v = _arrays(Z, V)
    if p < 1:
        raise ValueError("p must be >= 1")
    _check_tensor_size(z.shape[0], p)
    quotient = (kron_power(z + h * v, p) - kron_power(z, p)) / h
    return float(np.max(np.abs(quotient - tensor_power_derivative(z, v, p))))


def generalized_sk_margin(As: Sequence[MatrixLike], X: MatrixLike, p: int) -> LoewnerMargin:
    """``S_n + S_(n-2) + ... - (S_(n-1) + S_(n-3) + ...)`` where ``S_k`` sums
    ``(x)^p`` of every k-subset sum shifted by ``X``."""
    arrs = _arrays(*As, X)
    mats_in, x = arrs[:-1], arrs[-1]
    n = len(mats_in)
    if n > MAX_SK_TERMS:
        raise SizeLimit(f"at most {MAX_SK_TERMS} summands")
    if p < 1:
        raise ValueError("p must be >= 1")
    _check_tensor_size(x.shape[0], p)
    sets, mats = zip(*_subset_sums(mats_in, x))
    signs = [(-1) ** (n - len(s)) for s in sets]
    return _loewner([kron_power(m, p) for m in mats], signs, _radii(mats) ** p)


# root determinants -----------------------------------------------------------

def _root_dets(mats: Sequence[np.ndarray], exponent: float) -> np.ndarray:
    """``det(M)^exponent`` from eigenvalues.

    Eigenvalues below ``64 N eps`` times the largest operand spectral radius
    are rounding noise of a singular matrix and are set to zero; below
    ``-64 N eps`` times that radius the operand is not positive semidefinite.
    """
    eigs = np.linalg.eigvalsh(np.stack(mats))
    n = eigs.shape[1]
    snap = 64 * n * _EPS * max(float(np.max(np.abs(eigs))), np.finfo(float).tiny)
    if np.any(eigs < -snap):
        raise NegativeDeterminant("operand is not positive semidefinite")
    eigs = np.where(eigs <= snap, 0.0, eigs)
    return np.prod(eigs**exponent, axis=1)


def serre_reverse_terms(A, B, C) -> tuple[float, float]:
    a, b, c = _arrays(A, B, C)
    if a.shape[0] != 2:
        raise DimensionMismatch("the reversed inequality is stated for 2 x 2 matrices")
    mats, signs = _hh_operands(a, b, c)
    vals = _root_dets(mats, 0.5)
    return signed_fsum(vals.tolist(), [-s for s in signs])


def serre_reverse_margin(A, B, C) -> float:
    """``sum det^(1/2)(pairs) - sum det^(1/2)(singles) - det^(1/2)(A+B+C)`` on 2 x 2 PSD."""
    return serre_reverse_terms(A, B, C)[0]


def minkowski_like_terms(A, B, C) -> tuple[float, float]:
    a, b, c = _arrays(A, B, C)
    n = a.shape[0]
    r = _root_dets([a + b, a + c, b, c, a, a + b + c], 1.0 / n)
    terms = [r[0] * r[1], r[2] * r[3], r[4] * r[5]]
    return signed_fsum(terms, [1, -1, -1])


def minkowski_like_margin(A, B, C) -> float:
    """``det^(1/n)(A+B) det^(1/n)(A+C) - det^(1/n)B det^(1/n)C - det^(1/n)A det^(1/n)(A+B+C)``."""
    return minkowski_like_terms(A, B, C)[0]


def detrho_alternating_terms(As: Sequence[MatrixLike], rho: float) -> tuple[float, float]:
    arrs = _arrays(*As)
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    sets, mats = zip(*list(_subset_sums(arrs, None))[1:])
    eigs = np.linalg.eigvalsh(np.stack(mats))
    if np.any(eigs[:, 0] < SINGULAR_RATIO * eigs[:, -1]) or np.any(eigs[:, -1] <= 0):
        raise SingularMatrix("a subset sum is numerically singular")
    vals = np.exp(-rho * np.sum(np.log(eigs), axis=1))
    signs = [1 if len(s) % 2 else -1 for s in sets]
    return signed_fsum(vals.tolist(), signs)


def detrho_alternating_sum(As: Sequence[MatrixLike], rho: float) -> float:
    """``sum det^-rho(Ai) - sum det^-rho(Ai+Aj) + ... + (-1)^(n-1) det^-rho(sum Ai)``."""
    return detrho_alternating_terms(As, rho)[0]


# Vasic-Adamovic scheme -------------------------------------------------------

@dataclass(frozen=True)
class Functional:
    """A function on vectors or matrices used with :func:`va_margin`.

    ``hh_assumed`` records that the three-variable Hornich-Hlawka inequality
    is known for this functional; otherwise it is re-checked on every call.
    ``error_scale``, when given, bounds the rounding error of one evaluation
    (for determinants, ``rho(M)^N``) and widens the comparison scale.
    """

    id: str
    fn: Callable[[np.ndarray], float]
    hh_assumed: bool = True
    error_scale: Callable[[np.ndarray], float] | None = None

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))


def norm_functional() -> Functional:
    return Functional("norm", lambda x: float(np.linalg.norm(np.ravel(x))))


def det_shift_functional(T: MatrixLike) -> Functional:
    """``V -> det(V + T) - det(T)``; Hornich-Hlawka for PSD ``T`` and ``V``."""
    t = as_array(T)
    dt = float(det_stack(t))
    n = t.shape[0]

    def error_scale(v):
        return max(float(_radii([as_array(v) + t])[0]), float(_radii([t])[0])) ** n

    return Functional("det-shift", lambda v: float(det_stack(as_array(v) + t)) - dt, error_scale=error_scale)


def scalar_shift_functional(f, t: float) -> Functional:
    """``v -> f(v + t) - f(t)`` for a scalar function with positive third differences."""
    from .scalar import eval_function

    ft = eval_function(f, t)
    return Functional(f"{f.id}-shift({t!r})", lambda v: eval_function(f, float(v) + t) - ft)


def _check_hh(phi: Functional, xs: list[np.ndarray], tol: float) -> None:
    for i, j, l in combinations(range(len(xs)), 3):
        a, b, c = xs[i], xs[j], xs[l]
        terms = [phi(a), phi(b), phi(c), phi(a + b + c), phi(a + b), phi(b + c), phi(c + a)]
        margin, scale = signed_fsum(terms, [1, 1, 1, 1, -1, -1, -1])
        if margin < -tol * scale:
            raise HypothesisViolation(f"{phi.id} fails the three-variable inequality on inputs {(i, j, l)}")


def va_terms(xs: Sequence, k: int, phi: Functional, strict: bool = False, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    arrs = [np.asarray(x, dtype=float) for x in xs]
    n = len(arrs)
    if not 2 <= k < n:
        raise IndexError(f"need 2 <= k < n, got k={k}, n={n}")
    if strict or not phi.hh_assumed:
        _check_hh(phi, arrs, tol)
    c1, c2 = math.comb(n - 2, k - 1), math.comb(n - 2, k - 2)
    points = [(c1, x) for x in arrs] + [(c2, sum(arrs))]
    signs = [1] * (n + 1)
    for s in combinations(range(n), k):
        points.append((1, sum(arrs[i] for i in s)))
        signs.append(-1)
    value, scale = signed_fsum([c * phi(x) for c, x in points], signs)
    if phi.error_scale is not None:
        scale = max(scale, max(c * phi.error_scale(x) for c, x in points))
    return value, scale


def va_margin(xs: Sequence, k: int, phi: Functional, strict: bool = False) -> float:
    """``C(n-2,k-1) sum phi(xi) + C(n-2,k-2) phi(sum xi) - sum_{|S|=k} phi(sum_S x)``."""
    return va_terms(xs, k, phi, strict)[0]
