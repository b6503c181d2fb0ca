"""Seeded, parallel Monte Carlo harness for estimator performance studies.

A study draws N replicate samples from a copula model, builds the
pseudo-observation sequences once per replicate, evaluates every
(estimator, margin, q, k) cell on them, and aggregates mean, bias,
variance and MSE per cell against the model's ground-truth eta.

Determinism contract: replicate r draws its sample from the stream
derived from (master_seed, r) alone, and aggregation merges replicate
accumulators along a fixed index-order tree, so results are byte-stable
under any worker count.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bias import SecondOrderParams, SecondOrderSource, effective_tau, \
    estimate_second_order, reduced_bias_eta
from .copulas import CopulaModel, Family, replicate_generator, sample_copula
from .errors import ResidualDepError
from .estimators import EstimatorSpec, Margin, eta_hat
from .pseudo import BivariateSample, PseudoSample

__all__ = [
    "KstarRule",
    "SecondOrderSpec",
    "StudyConfig",
    "CellResult",
    "SimulationReport",
    "run_study",
    "emit_report",
    "write_report",
    "load_config",
    "config_from_dict",
]

ALL_MARGINS = (Margin.PARETO_T, Margin.FRECHET_SHIFTED, Margin.FRECHET_UNSHIFTED)
DEFAULT_Q_GRID = tuple(round(0.1 * i, 1) for i in range(1, 20))


@dataclass(frozen=True)
class KstarRule:
    """How the auxiliary order-statistic count k* is chosen per cell.

    Whatever the rule yields is capped at isqrt(k) cell by cell, keeping
    every cell inside the k* <= sqrt(k) validity region of the correction.
    """

    kind: str  # "pow_n" | "sqrt_k" | "fixed"
    value: float = 0.3

    @classmethod
    def pow_n(cls, power: float = 0.3) -> "KstarRule":
        return cls(kind="pow_n", value=float(power))

    @classmethod
    def sqrt_k(cls) -> "KstarRule":
        return cls(kind="sqrt_k", value=0.0)

    @classmethod
    def fixed(cls, count: int) -> "KstarRule":
        if count < 1:
            raise ValueError(f"fixed k* must be >= 1, got {count}")
        return cls(kind="fixed", value=int(count))

    @classmethod
    def parse(cls, token) -> "KstarRule":
        """Accept 'powP' (e.g. pow0.3), 'sqrtk', or a plain integer."""
        if isinstance(token, KstarRule):
            return token
        if isinstance(token, int):
            return cls.fixed(token)
        token = str(token).strip().lower()
        if token == "sqrtk":
            return cls.sqrt_k()
        if token.startswith("pow"):
            return cls.pow_n(float(token[3:]))
        return cls.fixed(int(token))

    def token(self) -> str:
        if self.kind == "sqrt_k":
            return "sqrtk"
        if self.kind == "pow_n":
            return f"pow{self.value:g}"
        return str(int(self.value))

    def resolve(self, n: int, k: int) -> int:
        if self.kind == "pow_n":
            raw = max(int(n ** self.value), 10)
        elif self.kind == "sqrt_k":
            raw = math.isqrt(k)
        else:
            raw = int(self.value)
        return max(1, min(raw, math.isqrt(k), n - 1))


@dataclass(frozen=True)
class SecondOrderSpec:
    """Where the (tau, beta) pair for bias correction comes from.

    mode 'per_replicate': estimated from each replicate's T sequence at
    threshold k0 (default [n^0.999]).  mode 'oracle': tau defaults to the
    model's effective second-order parameter and beta to 0, either
    overridable.  mode 'user': both values must be given.
    """

    mode: str = "per_replicate"
    tau: float | None = None
    beta: float | None = None
    k0: int | None = None

    def __post_init__(self):
        if self.mode not in ("per_replicate", "oracle", "user"):
            raise ValueError(f"unknown second-order mode {self.mode!r}")
        if self.mode == "user" and (self.tau is None or self.beta is None):
            raise ValueError("second-order mode 'user' requires both tau and beta")

    def resolve(self, model: CopulaModel, pseudo: PseudoSample) -> SecondOrderParams:
        if self.mode == "per_replicate":
            return estimate_second_order(pseudo, self.k0)
        if self.mode == "oracle":
            if self.tau is not None:
                tau = self.tau
            else:
                if model.true_eta is None or model.true_tau is None:
                    raise ValueError(
                        f"{model.family.value} theta={model.theta} has no ground truth; "
                        "oracle second-order mode needs an explicit tau"
                    )
                tau = effective_tau(model.true_eta, model.true_tau) if model.true_tau > 0 \
                    else model.true_eta
            beta = 0.0 if self.beta is None else self.beta
        else:
            tau, beta = self.tau, self.beta
        return SecondOrderParams(tau_hat=float(tau), beta_hat=float(beta), k0=0,
                                 source=SecondOrderSource.USER_SUPPLIED)


@dataclass(frozen=True)
class StudyConfig:
    """Full description of one simulation study.

    ``k_grid`` entries may be integers (absolute k) or fractions in (0, 1),
    floored via [n * f]; ``None`` selects every integer k up to [0.3 n].
    ``q_grid`` defaults to 0.1, 0.2, ..., 1.9 and ``margins`` to all three
    pseudo-observation scales.
    """

    model: CopulaModel
    n: int = 500
    N: int = 1000
    q_grid: tuple = DEFAULT_Q_GRID
    k_grid: tuple | None = None
    margins: tuple = ALL_MARGINS
    kstar_rule: KstarRule = field(default_factory=lambda: KstarRule.pow_n(0.3))
    master_seed: int = 0
    second_order: SecondOrderSpec = field(default_factory=SecondOrderSpec)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if self.N < 1:
            raise ValueError(f"need N >= 1, got {self.N}")
        object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))
        if any(q <= 0.0 for q in self.q_grid):
            raise ValueError("q_grid values must be positive")
        object.__setattr__(self, "margins", tuple(Margin(m) for m in self.margins))
        object.__setattr__(self, "kstar_rule", KstarRule.parse(self.kstar_rule))
        object.__setattr__(self, "k_grid", self._resolve_k_grid(self.k_grid))

    def _resolve_k_grid(self, raw) -> tuple:
        if raw is None:
            return tuple(range(1, int(0.3 * self.n) + 1))
        ks = []
        for entry in raw:
            k = int(self.n * entry) if 0 < entry < 1 else int(entry)
            if not 1 <= k < self.n:
                raise ValueError(f"k_grid entry {entry!r} resolves to k={k}, need 1 <= k < n")
            ks.append(k)
        return tuple(sorted(set(ks)))

    def canonical_dict(self) -> dict:
        return {
            "model": {"family": self.model.family.value, "theta": self.model.theta},
            "n": self.n,
            "N": self.N,
            "q_grid": list(self.q_grid),
            "k_grid": list(self.k_grid),
            "margins": [m.value for m in self.margins],
            "kstar_rule": self.kstar_rule.token(),
            "master_seed": self.master_seed,
            "second_order": {
                "mode": self.second_order.mode,
                "tau": self.second_order.tau,
                "beta": self.second_order.beta,
                "k0": self.second_order.k0,
            },
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def config_from_dict(d: dict) -> StudyConfig:
    """Build a StudyConfig from the documented key-value (JSON) format."""
    d = dict(d)
    model_d = d.pop("model")
    model = CopulaModel(Family(model_d["family"]), float(model_d["theta"]))
    so_raw = d.pop("second_order", "per_replicate")
    if isinstance(so_raw, str):
        so = SecondOrderSpec(mode=so_raw)
    else:
        so = SecondOrderSpec(
            mode=so_raw.get("mode", "user"),
            tau=so_raw.get("tau"),
            beta=so_raw.get("beta"),
            k0=so_raw.get("k0"),
        )
    kwargs = {}
    for key in ("n", "N", "master_seed"):
        if key in d:
            kwargs[key] = int(d.pop(key))
    for key in ("q_grid", "k_grid", "margins", "kstar_rule"):
        if key in d:
            kwargs[key] = d.pop(key)
    if d:
        raise ValueError(f"unknown study-config keys: {sorted(d)}")
    return StudyConfig(model=model, second_order=so, **kwargs)


def load_config(path, master_seed: int | None = None) -> StudyConfig:
    with open(path, "r", encoding="utf-8") as fh:
        config = config_from_dict(json.load(fh))
    if master_seed is not None:
        config = replace(config, master_seed=int(master_seed))
    return config


# --- cell bookkeeping -------------------------------------------------------

@dataclass(frozen=True)
class _CellDef:
    estimator: str  # "raw" | "reduced"
    margin: Margin
    q: float
    spec: EstimatorSpec
    k: int
    kstar: int | None


def _build_cells(config: StudyConfig) -> list[_CellDef]:
    cells = []
    for margin in config.margins:
        for q in config.q_grid:
            spec = EstimatorSpec.conjugate(q, margin=margin)
            for k in config.k_grid:
                cells.append(_CellDef("raw", margin, q, spec, k, None))
    if Margin.FRECHET_SHIFTED in config.margins:
        for q in config.q_grid:
            spec = EstimatorSpec.conjugate(q, margin=Margin.FRECHET_SHIFTED)
            for k in config.k_grid:
                kstar = config.kstar_rule.resolve(config.n, k)
                cells.append(_CellDef("reduced", Margin.FRECHET_SHIFTED, q, spec, k, kstar))
    return cells


def _evaluate_replicate(config: StudyConfig, cells: list[_CellDef], r: int) -> np.ndarray:
    rng = replicate_generator(config.master_seed, r)
    u, v = sample_copula(config.model, config.n, rng)
    pseudo = PseudoSample.from_sample(BivariateSample(u, v))
    so = None
    so_failed = False
    if any(c.estimator == "reduced" for c in cells):
        try:
            so = config.second_order.resolve(config.model, pseudo)
        except (ResidualDepError, ValueError):
            so_failed = True
    out = np.empty(len(cells))
    for j, cell in enumerate(cells):
        try:
            if cell.estimator == "raw":
                out[j] = eta_hat(pseudo, cell.k, cell.spec)
            elif so_failed:
                out[j] = math.nan
            else:
                out[j] = reduced_bias_eta(pseudo, cell.k, cell.kstar, cell.spec.a, so).eta
        except (ResidualDepError, ValueError, ArithmeticError):
            out[j] = math.nan
    return out


def _evaluate_replicate_star(args):
    return _evaluate_replicate(*args)


# --- order-insensitive moment merging ---------------------------------------

class _Moments:
    """Per-cell count/mean/M2 plus mean squared error about the truth."""

    __slots__ = ("rank", "count", "mean", "m2", "sq_err")

    def __init__(self, rank, count, mean, m2, sq_err):
        self.rank = rank
        self.count = count
        self.mean = mean
        self.m2 = m2
        self.sq_err = sq_err

    @classmethod
    def leaf(cls, values: np.ndarray, truth: float) -> "_Moments":
        ok = np.isfinite(values)
        count = ok.astype(np.int64)
        mean = np.where(ok, values, 0.0)
        sq = np.where(ok, (values - truth) ** 2, 0.0) if math.isfinite(truth) \
            else np.zeros_like(mean)
        return cls(1, count, mean, np.zeros_like(mean), sq)

    def merge(self, other: "_Moments") -> "_Moments":
        count = self.count + other.count
        safe = np.maximum(count, 1)
        w_other = other.count / safe
        delta = other.mean - self.mean
        mean = self.mean + delta * w_other
        m2 = self.m2 + other.m2 + delta * delta * self.count * w_other
        sq_err = self.sq_err + (other.sq_err - self.sq_err) * w_other
        return _Moments(self.rank + other.rank, count, mean, m2, sq_err)


def _merge_stream(chunks, truth: float) -> _Moments:
    """Fold replicate vectors (in index order) along a fixed binary tree."""
    stack: list[_Moments] = []
    for values in chunks:
        node = _Moments.leaf(values, truth)
        while stack and stack[-1].rank == node.rank:
            node = stack.pop().merge(node)
        stack.append(node)
    node = stack.pop()
    while stack:
        node = stack.pop().merge(node)
    return node


# --- report -----------------------------------------------------------------

@dataclass(frozen=True)
class CellResult:
    estimator: str
    margin: str
    q: float
    a: float
    b: float
    k: int
    k_over_n: float
    kstar: int | None
    mean: float
    bias: float
    variance: float
    mse: float
    n_ok: int
    n_fail: int

    @property
    def fail_fraction(self) -> float:
        total = self.n_ok + self.n_fail
        return self.n_fail / total if total else 0.0


@dataclass(frozen=True)
class SimulationReport:
    cells: tuple
    master_seed: int
    config_hash: str
    n: int
    n_replicates: int
    true_eta: float | None

    @property
    def flagged(self) -> tuple:
        """Cells where more than 10% of replicates failed."""
        return tuple(c for c in self.cells if c.fail_fraction > 0.1)

    def cell(self, estimator: str, margin, q: float, k: int) -> CellResult:
        margin = Margin(margin).value
        for c in self.cells:
            if (c.estimator, c.margin, c.k) == (estimator, margin, k) and c.q == q:
                return c
        raise KeyError(f"no cell ({estimator}, {margin}, q={q}, k={k})")


def run_study(config: StudyConfig, *, workers: int = 1) -> SimulationReport:
    """Execute the study; results are independent of ``workers``.

    Replicates are distributed over worker processes when ``workers`` > 1;
    the per-replicate streams and the fixed-order aggregation tree make the
    report bit-identical for any worker count.
    """
    cells = _build_cells(config)
    truth = config.model.true_eta if config.model.true_eta is not None else math.nan
    indices = range(config.N)
    if workers <= 1 or config.N == 1:
        chunks = (_evaluate_replicate(config, cells, r) for r in indices)
        moments = _merge_stream(chunks, truth)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            args = ((config, cells, r) for r in indices)
            chunk = max(1, config.N // (workers * 4))
            results = pool.map(_evaluate_replicate_star, args, chunksize=chunk)
            moments = _merge_stream(results, truth)

    out = []
    for j, cell in enumerate(cells):
        n_ok = int(moments.count[j])
        mean = float(moments.mean[j]) if n_ok else math.nan
        variance = float(moments.m2[j] / n_ok) if n_ok else math.nan
        bias = mean - truth if (n_ok and math.isfinite(truth)) else math.nan
        mse = float(moments.sq_err[j]) if (n_ok and math.isfinite(truth)) else math.nan
        out.append(CellResult(
            estimator=cell.estimator, margin=cell.margin.value, q=cell.q,
            a=cell.spec.a, b=cell.spec.b, k=cell.k, k_over_n=cell.k / config.n,
            kstar=cell.kstar, mean=mean, bias=bias, variance=variance, mse=mse,
            n_ok=n_ok, n_fail=config.N - n_ok,
        ))
    return SimulationReport(
        cells=tuple(out), master_seed=config.master_seed,
        config_hash=config.config_hash(), n=config.n, n_replicates=config.N,
        true_eta=config.model.true_eta,
    )


CSV_COLUMNS = ("estimator", "margin", "q", "a", "b", "k", "k_over_n", "kstar",
               "mean", "bias", "variance", "mse", "n_ok", "n_fail")


def _sorted_cells(report: SimulationReport):
    return sorted(report.cells, key=lambda c: (c.estimator, c.margin, c.q, c.a, c.b, c.k))


def _cell_fields(cell: CellResult):
    return (cell.estimator, cell.margin, cell.q, cell.a, cell.b, cell.k,
            cell.k_over_n, cell.kstar, cell.mean, cell.bias, cell.variance,
            cell.mse, cell.n_ok, cell.n_fail)


def emit_report(report: SimulationReport, format: str = "csv") -> str:
    """Serialise the report; 'csv' or 'jsonl', deterministic row order."""
    cells = _sorted_cells(report)
    if format == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for cell in cells:
            fields = ["" if v is None else (repr(v) if isinstance(v, float) else str(v))
                      for v in _cell_fields(cell)]
            lines.append(",".join(fields))
        return "\n".join(lines) + "\n"
    if format == "jsonl":
        lines = []
        for cell in cells:
            row = dict(zip(CSV_COLUMNS, _cell_fields(cell)))
            lines.append(json.dumps(row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def write_report(report: SimulationReport, path, format: str = "csv") -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit_report(report, format))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
