"""Symmetric matrices and the matrix functions the inequalities are stated in.

Löwner comparisons are quantified by the smallest eigenvalue of the
difference; eigenvalues come from LAPACK's symmetric solver (``eigvalsh``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Mapping, Union

import numpy as np

from ._common import DEFAULT_TOL
from ._kernels import permanent_ryser, weighted_permutation_sum
from .errors import DimensionMismatch, InvalidCharacter, SizeLimit

MAX_TENSOR_DIM = 4096
MAX_PERMANENT_DIM = 14
MAX_IMMANANT_DIM = 8
MAX_NAIVE_PERMANENT_DIM = 10
ASYMMETRY_WARN = 1e-12


class SymMatrix:
    """Immutable real symmetric matrix.

    The input is symmetrized as ``(a + a.T) / 2`` on construction, which
    leaves an already symmetric array bit-for-bit unchanged.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float, ndmin=2)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        self._a = a

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __add__(self, other):
        return SymMatrix(self._a + as_array(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SymMatrix(self._a - as_array(other))

    def __mul__(self, c):
        return SymMatrix(float(c) * self._a)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def __repr__(self):
        return f"SymMatrix({self._a.tolist()!r})"

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._a)

    def tolist(self):
        return self._a.tolist()

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def from_text(cls, text: str) -> "SymMatrix":
        """Parse ``N`` on the first line followed by ``N`` rows of ``N`` numbers."""
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or len(lines[0]) != 1:
            raise ValueError("first line must hold the dimension N")
        n = int(lines[0][0])
        rows = lines[1:]
        if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionMismatch(f"expected {n} rows of {n} entries")
        a = np.array([[float(v) for v in r] for r in rows])
        asym = float(np.max(np.abs(a - a.T)))
        if asym > ASYMMETRY_WARN:
            warnings.warn(f"matrix asymmetric by {asym:.3g}; symmetrizing", stacklevel=2)
        return cls(a)

    def to_text(self) -> str:
        rows = [" ".join(repr(float(v)) for v in row) for row in self._a]
        return "\n".join([str(self.dim), *rows]) + "\n"


MatrixLike = Union[SymMatrix, np.ndarray, list]


def as_array(m: MatrixLike) -> np.ndarray:
    """Square float array view of ``m``; symmetrized when it is not exactly symmetric."""
    if isinstance(m, SymMatrix):
        return m.a
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        a = (a + a.T) / 2.0
    return a


def common_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"operands have different dimensions {sorted(dims)}")
    return dims.pop()


def spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(a)))) if a.size else 0.0


@dataclass(frozen=True)
class LoewnerMargin:
    """Smallest eigenvalue of a symmetric difference and the comparison scale."""

    value: float
    scale: float

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return self.value >= -tol * self.scale


def loewner_margin(A: MatrixLike, B: MatrixLike) -> LoewnerMargin:
    """``A >= B`` in Löwner order iff the returned value is >= -tol * scale."""
    a, b = as_array(A), as_array(B)
    common_dim(a, b)
    value = float(np.linalg.eigvalsh(a - b)[0])
    return LoewnerMargin(value, max(spectral_radius(a), spectral_radius(b)))


def det_stack(m: np.ndarray) -> np.ndarray:
    """LU determinant of one matrix or a stack; exactly singular input gives 0 without a warning."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.linalg.det(m)


def det(A: MatrixLike) -> float:
    return float(det_stack(as_array(A)))


# elementary symmetric functions --------------------------------------------

def esym_from_eigenvalues(eigs) -> np.ndarray:
    """All elementary symmetric polynomials ``e_0..e_N`` of ``eigs``.

    Uses the product expansion of ``prod (1 + lambda_i t)``; unlike Newton's
    identities it never subtracts power sums.
    """
    e = np.zeros(len(eigs) + 1)
    e[0] = 1.0
    for lam in eigs:
        e[1:] = e[1:] + lam * e[:-1]
    return e


def esym_all(A: MatrixLike) -> np.ndarray:
    return esym_from_eigenvalues(np.linalg.eigvalsh(as_array(A)))


def esym(A: MatrixLike, k: int) -> float:
    """k-th elementary symmetric function of the eigenvalues of ``A``."""
    a = as_array(A)
    if not 0 <= k <= a.shape[0]:
        raise IndexError(f"k={k} outside 0..{a.shape[0]}")
    return float(esym_all(a)[k])


def esym_newton(eigs) -> np.ndarray:
    """Newton's identities from power sums.

    Kept for comparison only; it loses relative accuracy on matrices with
    widely spread eigenvalues.
    """
    eigs = np.asarray(eigs, dtype=float)
    n = eigs.size
    p = [float(np.sum(eigs**i)) for i in range(n + 1)]
    e = [1.0]
    for k in range(1, n + 1):
        e.append(math.fsum((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)) / k)
    return np.array(e)


def esym_minors(A: MatrixLike, k: int) -> float:
    """Sum of all k x k principal minors (exponential-cost reference)."""
    a = as_array(A)
    n = a.shape[0]
    if not 0 <= k <= n:
        raise IndexError(f"k={k} outside 0..{n}")
    if k == 0:
        return 1.0
    return math.fsum(det_stack(a[np.ix_(s, s)]) for s in combinations(range(n), k))


def compound_matrix(A: MatrixLike, k: int) -> SymMatrix:
    """k-th compound: the matrix of k x k minors indexed by lexicographic k-subsets."""
    a = as_array(A)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise IndexError(f"k={k} outside 1..{n}")
    sets = list(combinations(range(n), k))
    blocks = np.array([[a[np.ix_(r, c)] for c in sets] for r in sets])
    return SymMatrix(det_stack(blocks))


# permanents and immanants --------------------------------------------------

def permanent(A: MatrixLike) -> float:
    """Permanent by Ryser's inclusion-exclusion with Gray-code column updates."""
    a = as_array(A)
    if a.shape[0] > MAX_PERMANENT_DIM:
        raise SizeLimit(f"permanent limited to N <= {MAX_PERMANENT_DIM}")
    return permanent_ryser(a)


def permanent_naive(A: MatrixLike) -> float:
    a = as_array(A)
    n = a.shape[0]
    if n > MAX_NAIVE_PERMANENT_DIM:
        raise SizeLimit(f"naive permanent limited to N <= {MAX_NAIVE_PERMANENT_DIM}")
    return math.fsum(math.prod(a[i, s[i]] for i in range(n)) for s in permutations(range(n)))


@lru_cache(maxsize=None)
def permutation_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of ``range(n)`` in lexicographic order and their signs."""
    perms = np.array(list(permutations(range(n))), dtype=np.int_).reshape(-1, n)
    signs = np.empty(len(perms))
    for r, p in enumerate(perms):
        seen, parity = [False] * n, 0
        for i in range(n):
            if not seen[i]:
                j, length = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = p[j]
                    length += 1
                parity += length - 1
        signs[r] = -1.0 if parity % 2 else 1.0
    perms.setflags(write=False)
    signs.setflags(write=False)
    return perms, signs


@dataclass(frozen=True)
class CharacterSpec:
    """Permutation weights for an immanant over the full symmetric group.

    ``kind="sign"`` gives the determinant, ``kind="trivial"`` the permanent;
    ``kind="custom"`` takes a mapping (or callable) from permutation tuples
    to real weights.
    """

    kind: str = "sign"
    custom: Union[Mapping[tuple, float], Callable[[tuple], float], None] = None

    def __post_init__(self):
        if self.kind not in ("sign", "trivial", "custom"):
            raise InvalidCharacter(f"unknown character kind {self.kind!r}")
        if self.kind == "custom" and self.custom is None:
            raise InvalidCharacter("custom character needs a weight map")

    def weights(self, n: int) -> np.ndarray:
        perms, signs = permutation_table(n)
        if self.kind == "sign":
            return signs
        if self.kind == "trivial":
            return np.ones(len(perms))
        out = np.empty(len(perms))
        for r, p in enumerate(perms):
            key = tuple(int(v) for v in p)
            try:
                w = self.custom(key) if callable(self.custom) else self.custom[key]
            except (KeyError, IndexError):
                raise InvalidCharacter(f"character undefined on permutation {key}") from None
            out[r] = float(w)
        return out


SIGN = CharacterSpec("sign")
TRIVIAL = CharacterSpec("trivial")


def immanant(A: MatrixLike, chi: CharacterSpec = SIGN) -> float:
    """``sum_sigma chi(sigma) prod_i a[i, sigma(i)]`` over all of S_N."""
    a = as_array(A)
    n = a.shape[0]
    if n > MAX_IMMANANT_DIM:
        raise SizeLimit(f"immanant limited to N <= {MAX_IMMANANT_DIM}")
    perms, _ = permutation_table(n)
    return weighted_permutation_sum(a, perms, chi.weights(n))


# tensor powers -------------------------------------------------------------

def _check_tensor_size(n: int, factors: int) -> None:
    if n**factors > MAX_TENSOR_DIM:
        raise SizeLimit(f"{n}^{factors} exceeds the tensor size cap {MAX_TENSOR_DIM}")


def kron_power(a: np.ndarray, p: int) -> np.ndarray:
    out = a
    for _ in range(p - 1):
        out = np.kron(out, a)
    return out


def tensor_power(A: MatrixLike, p: int) -> SymMatrix:
    """p-fold Kronecker power of ``A``."""
    a = as_array(A)
    if p < 1:
        raise ValueError("tensor power needs p >= 1")
    _check_tensor_size(a.shape[0], p)
    return SymMatrix(kron_power(a, p))


def mixed_kron(x: np.ndarray, k: int, v: np.ndarray, l: int) -> np.ndarray:
    out = v
    if k > 0:
        out = np.kron(kron_power(x, k), out)
    if l > 0:
        out = np.kron(out, kron_power(x, l))
    return out


def mixed_tensor(X: MatrixLike, k: int, V: MatrixLike, l: int) -> SymMatrix:
    """``X^{(x)k} (x) V (x) X^{(x)l}``; zero powers are dropped rather than stored as 1x1."""
    x, v = as_array(X), as_array(V)
    if k < 0 or l < 0:
        raise ValueError("tensor exponents must be nonnegative")
    common_dim(x, v)
    _check_tensor_size(x.shape[0], k + l + 1)
    return SymMatrix(mixed_kron(x, k, v, l))
