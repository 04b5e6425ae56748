"""Seeded campaigns, counterexample search and campaign reports.

Trial ``t`` of a campaign draws its inputs from a Philox stream keyed by
``(seed, t)``, so trials can run on any number of threads and the report
depends only on the inequality id and the configuration.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from ._common import DEFAULT_TOL, passes, select_witness
from .cone import (
    bernstein_pq_values,
    composed,
    cone_iterated_difference_terms,
    exp_linear,
    frechet_min,
    neg_sqrt_product,
    riesz_kernel,
    sz_bounds,
)
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    HHVerifyError,
    SizeLimit,
    UnknownInequality,
    UnknownTarget,
)
from .inequalities import (
    MAX_SK_TERMS,
    det_alternating_difference_terms,
    det_hlawka_with_base_terms,
    det_shift_functional,
    detrho_alternating_terms,
    esym_hlawka_terms,
    immanant_alternating_difference_terms,
    immanant_hh_terms,
    lemma_main_margin,
    minkowski_like_terms,
    norm_functional,
    operator_hh_margin,
    generalized_sk_margin,
    serre_reverse_terms,
    va_terms,
)
from .matrix import MAX_IMMANANT_DIM, SIGN, TRIVIAL, CharacterSpec, SymMatrix, _check_tensor_size
from .scalar import (
    _FACTORIES,
    divided_difference_terms,
    exp_neg,
    get_function,
    iterated_difference_terms,
)

DISTRIBUTIONS = ("gram", "gram+shift", "diagonal", "boundary")
DESCENT_STEPS = 20
_CONE_LO = 0.05


# configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    """Parameters of a campaign or search.

    ``order`` is the number of summands or the difference order, ``power``
    the tensor power.  ``k`` and ``l`` select the elementary symmetric index,
    the Vasic-Adamovic subset size or the mixed tensor exponents, depending
    on the inequality.  ``function`` names a catalog function for the scalar
    and cone probes, or the functional (``norm``/``det-shift``) for ``va``.
    """

    seed: int = 0
    trials: int = 1000
    dim: int = 2
    order: int = 3
    power: int = 2
    rho: float = 1.0
    alpha: float = 1.0
    distribution: str = "gram"
    tol: float = DEFAULT_TOL
    k: int | None = None
    l: int | None = None
    function: str | None = None
    character: str = "sign"
    shift: float = 0.1
    max_cond: float = 1e8
    boundary_mix: bool = True

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {', '.join(DISTRIBUTIONS)}")
        if not self.tol >= 0:
            raise ValueError("tol must be nonnegative")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "SearchConfig":
        """Build a config from strings or typed values; unknown keys are errors."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            name = key.replace("-", "_")
            if name == "p":
                name = "power"
            if name not in fields:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = _coerce(fields[name].type, raw)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(annotation: str, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    if "None" in annotation and text.lower() in ("", "none", "null"):
        return None
    if annotation.startswith("int"):
        return int(text)
    if annotation.startswith("float"):
        return float(text)
    if annotation.startswith("bool"):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return text


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


# sampling ---------------------------------------------------------------------

def _psd_array(n: int, rng: np.random.Generator, distribution: str, shift: float = 0.1) -> np.ndarray:
    if distribution == "diagonal":
        return np.diag(rng.exponential(size=n))
    if distribution == "boundary":
        width = int(rng.integers(0, n)) if n > 1 else 0
        g = rng.standard_normal((n, width))
        return g @ g.T
    g = rng.standard_normal((n, n))
    a = g @ g.T
    if distribution == "gram+shift":
        a = a + shift * np.eye(n)
    return a


def sample_psd(N: int, rng: np.random.Generator, distribution: str = "gram", shift: float = 0.1) -> SymMatrix:
    """Random positive semidefinite matrix.

    ``gram`` is ``G G^T`` with a standard normal square ``G``; ``gram+shift``
    adds ``shift * I``; ``diagonal`` has exponential diagonal entries;
    ``boundary`` is ``G G^T`` with ``G`` of width below ``N`` (rank deficient).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {distribution!r}")
    return SymMatrix(_psd_array(N, rng, distribution, shift))


def trial_distribution(cfg: SearchConfig, t: int) -> str:
    """Every fourth trial of a ``gram`` or ``diagonal`` campaign is a boundary sample."""
    if cfg.boundary_mix and cfg.distribution in ("gram", "diagonal") and t % 4 == 3:
        return "boundary"
    return cfg.distribution


def _matrices(*names: str):
    def sample(rng, cfg, t):
        dist = trial_distribution(cfg, t)
        return {n: _psd_array(cfg.dim, rng, dist, cfg.shift) for n in names}

    return sample


def _stack_and_base(count: Callable[[SearchConfig], int], with_base: bool = True):
    def sample(rng, cfg, t):
        dist = trial_distribution(cfg, t)
        w = {"As": np.stack([_psd_array(cfg.dim, rng, dist, cfg.shift) for _ in range(count(cfg))])}
        if with_base:
            w["X"] = _psd_array(cfg.dim, rng, dist, cfg.shift)
        return w

    return sample


def _well_conditioned(rng, cfg) -> np.ndarray:
    dist = "diagonal" if cfg.distribution == "diagonal" else "gram+shift"
    while True:
        a = _psd_array(cfg.dim, rng, dist, cfg.shift)
        e = np.linalg.eigvalsh(a)
        if e[0] > 0 and e[-1] <= cfg.max_cond * e[0]:
            return a


# registry ---------------------------------------------------------------------

Sampler = Callable[[np.random.Generator, SearchConfig, int], dict]
Evaluator = Callable[[dict, SearchConfig], tuple]


def _no_check(cfg: SearchConfig) -> None:
    return None


@dataclass(frozen=True)
class Entry:
    """A registered inequality, probe or falsification target.

    ``evaluate`` returns ``(margin, scale)``.  ``box`` maps witness keys to
    ``(lo, hi)`` arrays for targets sampled from a box; other targets are
    projected back onto the PSD cone during descent.
    """

    id: str
    anchor: str
    sample: Sampler
    evaluate: Evaluator
    check: Callable[[SearchConfig], None] = _no_check
    box: Mapping[str, tuple] | None = None
    exploratory: bool = False
    expect_violation: bool = False


def _arr(w, key):
    return np.asarray(w[key], dtype=float)


def _lm(m):
    return m.value, m.scale


def _chi(cfg: SearchConfig) -> CharacterSpec:
    if cfg.character == "sign":
        return SIGN
    if cfg.character == "trivial":
        return TRIVIAL
    raise ValueError(f"character must be 'sign' or 'trivial', got {cfg.character!r}")


def _esym_k(cfg):
    return cfg.dim if cfg.k is None else cfg.k


def _lemma_kl(cfg):
    return (1 if cfg.k is None else cfg.k), (1 if cfg.l is None else cfg.l)


def _va_k(cfg):
    return 2 if cfg.k is None else cfg.k


def _check_order(lo, hi=None):
    def check(cfg):
        if cfg.order < lo or (hi is not None and cfg.order > hi):
            raise SizeLimit(f"order must be in {lo}..{hi if hi is not None else 'inf'}")

    return check


def _checks(*fns):
    def check(cfg):
        for fn in fns:
            fn(cfg)

    return check


def _check_power(cfg):
    if cfg.power < 1:
        raise ValueError("power must be >= 1")
    _check_tensor_size(cfg.dim, cfg.power)


def _check_imm(cfg):
    _chi(cfg)
    if cfg.dim > MAX_IMMANANT_DIM:
        raise SizeLimit(f"immanants limited to N <= {MAX_IMMANANT_DIM}")


def _check_esym(cfg):
    if not 0 <= _esym_k(cfg) <= cfg.dim:
        raise SizeLimit(f"k must be in 0..{cfg.dim}")


def _check_lemma(cfg):
    k, l = _lemma_kl(cfg)
    if k < 0 or l < 0:
        raise ValueError("k and l must be nonnegative")
    _check_tensor_size(cfg.dim, k + l + 1)


def _check_serre(cfg):
    if cfg.dim != 2:
        raise DimensionMismatch("serre-rev is defined for 2 x 2 matrices")


def _check_rho(cfg):
    if cfg.rho < 0:
        raise ValueError("rho must be nonnegative")


def _check_va(cfg):
    if not 2 <= _va_k(cfg) < cfg.order:
        raise SizeLimit("va needs 2 <= k < order")
    if (cfg.function or "norm") not in ("norm", "det-shift"):
        raise ValueError("va functional must be 'norm' or 'det-shift'")


def _va_sample(rng, cfg, t):
    if (cfg.function or "norm") == "norm":
        return {"xs": rng.standard_normal((cfg.order, cfg.dim))}
    dist = trial_distribution(cfg, t)
    xs = np.stack([_psd_array(cfg.dim, rng, dist, cfg.shift) for _ in range(cfg.order)])
    return {"xs": xs, "T": _psd_array(cfg.dim, rng, "gram", cfg.shift)}


def _va_eval(w, cfg):
    if (cfg.function or "norm") == "norm":
        phi = norm_functional()
    else:
        phi = det_shift_functional(_arr(w, "T"))
    return va_terms(list(_arr(w, "xs")), _va_k(cfg), phi, tol=cfg.tol)


# scalar and cone probes

def _scalar_fn(cfg, default):
    name = cfg.function or default
    if name in _FACTORIES:
        return get_function(name, alpha=cfg.alpha)
    return get_function(name)


def _check_scalar(default, lo=0):
    def check(cfg):
        _scalar_fn(cfg, default)
        _check_order(lo)(cfg)

    return check


def _nconvex_sample(rng, cfg, t):
    a, b = _scalar_fn(cfg, "exp").probe_interval
    while True:
        pts = np.sort(rng.uniform(a, b, cfg.order + 1))
        if cfg.order == 0 or np.min(np.diff(pts)) >= 1e-6 * (b - a):
            return {"points": pts}


def _nconvex_eval(w, cfg):
    return divided_difference_terms(_scalar_fn(cfg, "exp"), _arr(w, "points"))


def _posdiff_sample(rng, cfg, t):
    a, b = _scalar_fn(cfg, "exp").probe_interval
    parts = rng.dirichlet(np.ones(cfg.order + 1)) * (b - a) * rng.uniform()
    return {"base": np.array([a + parts[0]]), "steps": parts[1:]}


def _posdiff_eval(w, cfg):
    return iterated_difference_terms(_scalar_fn(cfg, "exp"), float(_arr(w, "base")[0]), _arr(w, "steps"))


def _cone_fn(cfg, default):
    name = cfg.function or default
    if name == "exp-linear":
        return exp_linear(np.full(cfg.dim, cfg.alpha))
    if name == "riesz":
        return riesz_kernel(np.full(cfg.dim, cfg.alpha))
    if name == "min":
        return frechet_min()
    if name == "neg-sqrt-product":
        return neg_sqrt_product()
    raise ValueError(f"unknown cone function {name!r}")


def _check_cone(default, lo=1, hi=None):
    def check(cfg):
        f = _cone_fn(cfg, default)
        if f.dim is not None and f.dim != cfg.dim:
            raise DimensionMismatch(f"{f.id} takes {f.dim} coordinates")
        _check_order(lo, hi)(cfg)

    return check


def _cone_lo(f):
    return _CONE_LO if f.open_boundary else 0.0


def _cm_sample(rng, cfg, t):
    f = _cone_fn(cfg, "exp-linear")
    x = rng.uniform(_cone_lo(f), 2.0, cfg.dim)
    return {"x": x, "steps": rng.uniform(0.0, 1.0, (cfg.order, cfg.dim))}


def _cm_eval(w, cfg):
    m, s = cone_iterated_difference_terms(_cone_fn(cfg, "exp-linear"), _arr(w, "x"), list(_arr(w, "steps")))
    return (-1) ** cfg.order * m, s


def _sz_sample(rng, cfg, t):
    f = _cone_fn(cfg, "exp-linear")
    return {"points": rng.uniform(_cone_lo(f), 2.0, (cfg.order, cfg.dim))}


def _sz_eval(w, cfg):
    lower, upper, scale = sz_bounds(_cone_fn(cfg, "exp-linear"), list(_arr(w, "points")))
    return min(lower, upper), scale


def _pq_sample(rng, cfg, t):
    return {"alphas": rng.uniform(0.0, 3.0, cfg.order)}


def _pq_eval(w, cfg):
    p, q = bernstein_pq_values(_arr(w, "alphas"))
    return min(p, q), 1.0


def _conediff_fn(cfg):
    return composed(_scalar_fn(cfg, "exp"), np.ones(cfg.dim))


def _conediff_sample(rng, cfg, t):
    return {"x": rng.uniform(0.0, 1.0, cfg.dim), "steps": rng.uniform(0.0, 1.0, (cfg.order, cfg.dim))}


def _conediff_eval(w, cfg):
    return cone_iterated_difference_terms(_conediff_fn(cfg), _arr(w, "x"), list(_arr(w, "steps")))


def _matrix_entries() -> list[Entry]:
    return [
        Entry(
            "op-hh", "operator Hornich-Hlawka inequality for tensor powers",
            _matrices("A", "B", "C", "X"),
            lambda w, c: _lm(operator_hh_margin(w["A"], w["B"], w["C"], w["X"], c.power)),
            _check_power,
        ),
        Entry(
            "det-diff", "positive differences of every order for det on the PSD cone",
            _stack_and_base(lambda c: c.order),
            lambda w, c: det_alternating_difference_terms(list(_arr(w, "As")), _arr(w, "X")),
            _check_order(1),
        ),
        Entry(
            "det-hh", "determinantal Hornich-Hlawka inequality with base point",
            _matrices("A", "B", "C", "X"),
            lambda w, c: det_hlawka_with_base_terms(w["A"], w["B"], w["C"], w["X"]),
        ),
        Entry(
            "esym-hlawka", "Hornich-Hlawka inequality for elementary symmetric functions",
            _matrices("A", "B", "C"),
            lambda w, c: esym_hlawka_terms(w["A"], w["B"], w["C"], _esym_k(c)),
            _check_esym,
        ),
        Entry(
            "serre-rev", "reversed Hornich-Hlawka inequality for det^(1/2) on 2 x 2",
            _matrices("A", "B", "C"),
            lambda w, c: serre_reverse_terms(w["A"], w["B"], w["C"]),
            _check_serre,
        ),
        Entry(
            "minkowski-det", "Minkowski-type inequality for det^(1/n)",
            _matrices("A", "B", "C"),
            lambda w, c: minkowski_like_terms(w["A"], w["B"], w["C"]),
        ),
        Entry(
            "det-rho", "alternating subset sums of det^(-rho)",
            lambda rng, c, t: {"As": np.stack([_well_conditioned(rng, c) for _ in range(c.order)])},
            lambda w, c: detrho_alternating_terms(list(_arr(w, "As")), c.rho),
            _checks(_check_order(1), _check_rho),
        ),
        Entry(
            "imm-hh", "third-order positive differences of immanants",
            _matrices("A", "B", "C", "X"),
            lambda w, c: immanant_hh_terms(w["A"], w["B"], w["C"], w["X"], _chi(c)),
            _check_imm,
        ),
        Entry(
            "imm-diff", "higher-order immanant differences (exploratory, not a proved claim)",
            _stack_and_base(lambda c: c.order),
            lambda w, c: immanant_alternating_difference_terms(list(_arr(w, "As")), _arr(w, "X"), _chi(c)),
            _checks(_check_imm, _check_order(1, 6)),
            exploratory=True,
        ),
        Entry(
            "lemma-main", "Löwner inequality for mixed tensor products X^k (x) V (x) X^l",
            _matrices("X", "Y", "Z", "V"),
            lambda w, c: _lm(lemma_main_margin(w["X"], w["Y"], w["Z"], w["V"], *_lemma_kl(c))),
            _check_lemma,
        ),
        Entry(
            "sk-general", "alternating S_k^p sums of tensor powers over k-subsets",
            _stack_and_base(lambda c: c.order),
            lambda w, c: _lm(generalized_sk_margin(list(_arr(w, "As")), _arr(w, "X"), c.power)),
            _checks(_check_order(1, MAX_SK_TERMS), _check_power),
        ),
        Entry(
            "va", "binomial k-subset inequalities from the three-variable Hornich-Hlawka hypothesis",
            _va_sample, _va_eval, _check_va,
        ),
    ]


def _probe_entries() -> list[Entry]:
    return [
        Entry(
            "n-convex", "nonnegative divided differences of order n",
            _nconvex_sample, _nconvex_eval, _check_scalar("exp"),
        ),
        Entry(
            "pos-diff", "nonnegative iterated differences of order n on the half-line",
            _posdiff_sample, _posdiff_eval, _check_scalar("exp"),
        ),
        Entry(
            "cm-diff", "alternating-sign iterated differences of completely monotone functions on the cone",
            _cm_sample, _cm_eval, _check_cone("exp-linear", 1),
        ),
        Entry(
            "sz", "double bound 0 <= alternating subset sum <= f(0) for completely monotone functions",
            _sz_sample, _sz_eval, _check_cone("exp-linear", 1),
        ),
        Entry(
            "bernstein-pq", "nonnegativity of the exponential alternating sums P and Q",
            _pq_sample, _pq_eval, _check_order(2),
        ),
        Entry(
            "cone-diff", "positive differences of x -> f(<x, w>) on the cone",
            _conediff_sample, _conediff_eval, _check_scalar("exp", 1),
        ),
    ]


REGISTRY: dict[str, Entry] = {e.id: e for e in _matrix_entries() + _probe_entries()}


# falsification targets

def _box_sampler(box):
    def sample(rng, cfg, t):
        return {k: rng.uniform(lo, hi) for k, (lo, hi) in box.items()}

    return sample


def _box(**kw):
    return {k: (np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)) for k, (lo, hi) in kw.items()}


_POP_BOX = _box(xs=([0.0] * 3, [3.0] * 3))
_SQRT_BOX = _box(
    A=([0.5, 1.5], [1.5, 2.5]),
    B=([1.5, 0.5], [2.5, 1.5]),
    X=([1e-3, 1e-3], [0.1, 0.1]),
)
_CUBIC_BOX = _box(x=([0.0], [6.0]), h=([0.0], [2.0]))


def _pop_eval(w, cfg):
    return iterated_difference_terms(exp_neg(1.0), 0.0, _arr(w, "xs"))


def _sqrt_eval(w, cfg):
    return cone_iterated_difference_terms(neg_sqrt_product(), _arr(w, "X"), [_arr(w, "A"), _arr(w, "B")])


def _cubic_eval(w, cfg):
    return iterated_difference_terms(get_function("cubic-shift"), float(_arr(w, "x")[0]), _arr(w, "h"))


def _root_hh_eval(w, cfg):
    m, s = serre_reverse_terms(w["A"], w["B"], w["C"])
    return -m, s


TARGETS: dict[str, Entry] = {
    e.id: e
    for e in [
        Entry(
            "popoviciu-exp", "order-3 alternating sum of exp(-x) including the f(0) term",
            _box_sampler(_POP_BOX), _pop_eval, box=_POP_BOX, expect_violation=True,
        ),
        Entry(
            "neg-sqrt-2diff", "order-2 positive differences of -2 sqrt(xy) near A=(1,2), B=(2,1), X=(0.01,0.01)",
            _box_sampler(_SQRT_BOX), _sqrt_eval, box=_SQRT_BOX, expect_violation=True,
        ),
        Entry(
            "cubic-monotone", "monotonicity of 1 - (x-3) + (x-3)^3/6",
            _box_sampler(_CUBIC_BOX), _cubic_eval, box=_CUBIC_BOX, expect_violation=True,
        ),
        Entry(
            "root-det-hh", "forward Hornich-Hlawka inequality for det^(1/2) on 2 x 2 (exploratory)",
            _matrices("A", "B", "C"), _root_hh_eval, _check_serre, exploratory=True, expect_violation=True,
        ),
    ]
}


def get_entry(inequality: str) -> Entry:
    try:
        return REGISTRY[inequality]
    except KeyError:
        raise UnknownInequality(f"unknown inequality {inequality!r}") from None


def get_target(target: str) -> Entry:
    if target in TARGETS:
        return TARGETS[target]
    if target in REGISTRY:
        return REGISTRY[target]
    raise UnknownTarget(f"unknown search target {target!r}")


# campaigns --------------------------------------------------------------------

def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class CampaignReport:
    """Aggregate of a campaign; ``witness`` holds the inputs of trial ``min_trial``."""

    inequality: str
    config: dict
    trials: int
    min_margin: float
    witness: dict
    failures: int
    elapsed_ms: float
    scale: float = 0.0
    min_trial: int = 0
    exploratory: bool = False

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "config": dict(self.config),
            "trials": self.trials,
            "min_margin": self.min_margin,
            "witness": {k: _plain(v) for k, v in self.witness.items()},
            "failures": self.failures,
            "elapsed_ms": self.elapsed_ms,
            "scale": self.scale,
            "min_trial": self.min_trial,
            "exploratory": self.exploratory,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CampaignReport":
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def _evaluate_trial(entry: Entry, cfg: SearchConfig, t: int):
    w = entry.sample(trial_rng(cfg.seed, t), cfg, t)
    m, s = entry.evaluate(w, cfg)
    return float(m), float(s), w


def _map_trials(fn, indices, threads: int):
    if threads <= 1:
        return [fn(t) for t in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, indices))


def run_campaign(inequality: str, config: SearchConfig | None = None, threads: int = 1) -> CampaignReport:
    """Evaluate ``inequality`` on ``config.trials`` independently sampled inputs."""
    entry = get_entry(inequality)
    cfg = config or SearchConfig()
    entry.check(cfg)
    start = time.perf_counter()
    results = _map_trials(lambda t: _evaluate_trial(entry, cfg, t), range(cfg.trials), threads)
    margins = np.array([r[0] for r in results])
    scales = np.array([r[1] for r in results])
    i, nfail = select_witness(margins, scales, cfg.tol)
    elapsed = (time.perf_counter() - start) * 1e3
    return CampaignReport(
        inequality, cfg.to_dict(), cfg.trials, float(margins[i]),
        {k: _plain(v) for k, v in results[i][2].items()}, nfail, round(elapsed, 3),
        float(scales[i]), int(i), entry.exploratory,
    )


def trial_margins(inequality: str, config: SearchConfig | None = None, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Margins and scales of every trial of a campaign, in trial order."""
    entry = get_entry(inequality)
    cfg = config or SearchConfig()
    entry.check(cfg)
    results = _map_trials(lambda t: _evaluate_trial(entry, cfg, t)[:2], range(cfg.trials), threads)
    return np.array([r[0] for r in results]), np.array([r[1] for r in results])


def replay_witness(inequality: str, witness: Mapping[str, Any], config: SearchConfig | Mapping | None = None) -> tuple[float, float]:
    """Re-evaluate a witness; returns ``(margin, scale)``."""
    entry = get_entry(inequality) if inequality in REGISTRY else get_target(inequality)
    if config is None:
        cfg = SearchConfig()
    elif isinstance(config, SearchConfig):
        cfg = config
    else:
        cfg = SearchConfig.from_mapping(config)
    w = {k: np.asarray(v, dtype=float) for k, v in witness.items()}
    m, s = entry.evaluate(w, cfg)
    return float(m), float(s)


def replay_report(report: CampaignReport) -> tuple[float, float]:
    return replay_witness(report.inequality, report.witness, report.config)


# counterexample search ------------------------------------------------------------

@dataclass
class Witness:
    """A violating input found by :func:`search_counterexample`."""

    target: str
    inputs: dict
    margin: float
    scale: float
    trial: int
    sampled_margin: float
    evaluations: int = 0
    exploratory: bool = False

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "inputs": {k: _plain(v) for k, v in self.inputs.items()},
            "margin": self.margin,
            "scale": self.scale,
            "trial": self.trial,
            "sampled_margin": self.sampled_margin,
            "evaluations": self.evaluations,
            "exploratory": self.exploratory,
        }


def _project(entry: Entry, w: dict) -> dict:
    out = {}
    for k, v in w.items():
        if entry.box is not None and k in entry.box:
            lo, hi = entry.box[k]
            out[k] = np.clip(v, lo, hi)
        elif v.ndim >= 2 and v.shape[-1] == v.shape[-2]:
            sym = (v + np.swapaxes(v, -1, -2)) / 2
            e, q = np.linalg.eigh(sym)
            out[k] = (q * np.maximum(e, 0.0)[..., None, :]) @ np.swapaxes(q, -1, -2)
        else:
            out[k] = np.maximum(v, 0.0)
    return out


def _descend(entry: Entry, cfg: SearchConfig, w: dict, m: float, s: float):
    keys = list(w)
    shapes = [np.shape(w[k]) for k in keys]
    sizes = [int(np.prod(sh)) for sh in shapes]

    def flat(d):
        return np.concatenate([np.ravel(d[k]) for k in keys])

    def unflat(x):
        out, pos = {}, 0
        for k, sh, n in zip(keys, shapes, sizes):
            out[k] = x[pos:pos + n].reshape(sh)
            pos += n
        return out

    x = flat(w)
    if entry.box is not None:
        step = np.concatenate([np.ravel(entry.box[k][1] - entry.box[k][0]) for k in keys]) / 4.0
    else:
        step = np.full(x.size, 0.25 * max(float(np.max(np.abs(x))), 1e-3))
    evaluations = 0
    for _ in range(DESCENT_STEPS):
        for i in range(x.size):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] += sign * step[i]
                wy = _project(entry, unflat(y))
                try:
                    my, sy = entry.evaluate(wy, cfg)
                except (HHVerifyError, np.linalg.LinAlgError):
                    continue
                evaluations += 1
                if my < m:
                    x, m, s = flat(wy), float(my), float(sy)
                    break
        step = step / 2.0
    return unflat(x), m, s, evaluations


def search_counterexample(target: str, config: SearchConfig | None = None, threads: int = 1) -> Witness | None:
    """Sample until a margin falls below ``-10 tol scale``, then refine it by descent.

    Trials are visited in index order (in blocks when ``threads > 1``); the
    first violating trial is refined by coordinate descent with halving
    steps.  Returns ``None`` when no trial violates.
    """
    entry = get_target(target)
    cfg = config or SearchConfig()
    entry.check(cfg)
    block = max(1, threads) * 64
    evaluations = 0
    for lo in range(0, cfg.trials, block):
        idx = range(lo, min(lo + block, cfg.trials))
        results = _map_trials(lambda t: _safe_trial(entry, cfg, t), idx, threads)
        for t, r in zip(idx, results):
            if r is None:
                continue
            evaluations += 1
            m, s, w = r
            if m < -10 * cfg.tol * s:
                wd, md, sd, extra = _descend(entry, cfg, {k: np.asarray(v, dtype=float) for k, v in w.items()}, m, s)
                return Witness(target, wd, md, sd, t, m, evaluations + extra, entry.exploratory)
    return None


def _safe_trial(entry, cfg, t):
    try:
        return _evaluate_trial(entry, cfg, t)
    except (DegenerateInput,):
        return None


def campaign_passes(report: CampaignReport, tol: float | None = None) -> bool:
    t = report.config.get("tol", DEFAULT_TOL) if tol is None else tol
    return passes(report.min_margin, report.scale, t)
