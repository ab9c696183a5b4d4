"""Seeded experiment runs that turn the simulators into tables.

Every run is described by an :class:`ExperimentConfig`, validated up front,
and produces a :class:`Report` with one row per trial.  Trial ``i`` draws
from its own stream ``SeedSequence(seed, spawn_key=(i,))``, so rows do not
depend on how trials are spread across workers, and rows are always kept
in trial order.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .clifford import random_clifford
from .config import CAPACITY
from .dense import (
    DenseState,
    all_outcomes,
    dense_distribution,
    l1_distance,
    pauli_matrix,
)
from .errors import CapacityError, ConfigError, DomainError, ValidationError
from .fourier import (
    CoefficientEvaluator,
    SimInstance,
    coefficient_budget,
    error_bound,
    measured_cap,
    pbc_probability,
    random_instance,
    truncation_level,
)
from .inputs import QubitInput, magic_mu, mixedness, parse_input
from .iqp import (
    iqp_approx_distribution,
    iqp_dense_distribution,
    ensemble_moment_target,
    random_iqp,
    second_moment_bound,
    second_moment_bruteforce,
)
from .pauli import SignedPauli

SUBCOMMANDS = ("noisy-clifford", "pure-magic", "iqp", "pbc", "oracle-check")

# statistical thresholds sit this far below the guaranteed fractions
THRESHOLD_SLACK = 0.05
ORACLE_LIMIT = 8

COLUMNS = {
    "noisy-clifford": ("seed", "circuit_index", "n", "m", "k", "lambda_or_mu", "level",
                       "coeff_count", "l1_error", "bound", "within_bound", "wall_ms"),
    "iqp": ("seed", "circuit_index", "n", "epsilon", "level", "coeff_count", "l1_error",
            "bound", "within_bound", "wall_ms"),
    "iqp-moments": ("seed", "circuit_index", "n", "sum_p2", "moment_bound", "within_bound",
                    "wall_ms"),
    "pbc": ("seed", "circuit_index", "n", "k", "level", "coeff_count", "p_approx", "p_exact",
            "abs_error", "wall_ms"),
    "oracle-check": ("seed", "circuit_index", "check", "n_qubits", "max_deviation", "passed",
                     "wall_ms"),
}
COLUMNS["pure-magic"] = COLUMNS["noisy-clifford"]


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--tags", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    qubits: int = 2
    magic_count: int = 4
    inputs: tuple[str, ...] = ()
    epsilon: float | None = None
    delta: float = 0.1
    alpha: float = 8.0
    level: int | None = None
    measured: str = "all"
    trials: int = 10
    seed: int | None = None
    out: str = "-"
    format: str = "csv"
    jobs: int = 1
    force: bool = False
    moments: bool = False
    sweep: bool = False
    instance: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Resolved:
    """Config plus the parsed objects every trial needs."""

    cfg: ExperimentConfig
    n: int
    m: int
    inputs: tuple[QubitInput, ...]
    measured: tuple[int, ...]
    rate: float | None = None
    level: int | None = None
    label: str = ""

    def describe(self) -> dict:
        out = self.cfg.to_dict()
        out["resolved_inputs"] = [str(q) for q in self.inputs]
        out["resolved_measured"] = list(self.measured)
        out["rate"] = self.rate
        out["resolved_level"] = self.level
        return out


def _parse_measured(spec: str, n_qubits: int) -> tuple[int, ...]:
    """``all``, a count ``k`` (first k qubits), or a comma list ``0,2,3``."""
    text = spec.strip()
    if text == "all":
        return tuple(range(n_qubits))
    try:
        if "," in text:
            qs = tuple(int(v) for v in text.split(",") if v.strip())
        else:
            k = int(text)
            if not 0 <= k <= n_qubits:
                raise ConfigError(f"measured count {k} outside [0, {n_qubits}]")
            return tuple(range(k))
    except ValueError:
        raise ConfigError(f"cannot parse measured spec {spec!r}") from None
    if len(set(qs)) != len(qs) or any(not 0 <= q < n_qubits for q in qs):
        raise ConfigError(f"bad measured qubit list {spec!r}")
    return tuple(sorted(qs))


def _parse_inputs(specs: Sequence[str], count: int, default: str) -> tuple[QubitInput, ...]:
    specs = list(specs) or [default]
    try:
        parsed = [parse_input(s) for s in specs]
    except (ValidationError, DomainError) as exc:
        raise ConfigError(str(exc)) from None
    if len(parsed) == 1:
        parsed = parsed * count
    if len(parsed) != count:
        raise ConfigError(f"{len(parsed)} input specs for {count} inputs")
    return tuple(parsed)


def _common_checks(cfg: ExperimentConfig) -> None:
    if cfg.subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.trials < 1:
        raise ConfigError("trials must be positive")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be positive")
    if cfg.qubits < 0 or cfg.magic_count < 0:
        raise ConfigError("qubit counts must be non-negative")
    if not cfg.delta > 0:
        raise ConfigError("delta must be positive")
    if not cfg.alpha > 2:
        raise ConfigError("alpha must exceed 2")
    if cfg.epsilon is not None and not 0 <= cfg.epsilon <= 1:
        raise ConfigError("epsilon must lie in [0, 1]")
    stochastic = not (cfg.subcommand == "oracle-check" and cfg.instance)
    if stochastic and cfg.seed is None:
        raise ConfigError("a --seed is required for stochastic runs")
    if cfg.seed is not None and cfg.seed < 0:
        raise ConfigError("seed must be non-negative")


def _level(cfg: ExperimentConfig, rate: float, top: int) -> int:
    if cfg.level is not None:
        if not 0 <= cfg.level <= top:
            raise ConfigError(f"level {cfg.level} outside [0, {top}]")
        return cfg.level
    try:
        return truncation_level(cfg.delta, cfg.alpha, rate, top)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def resolve(cfg: ExperimentConfig) -> Resolved:
    """Validate everything before any computation starts."""
    _common_checks(cfg)
    sub = cfg.subcommand
    n, m = cfg.qubits, cfg.magic_count
    if sub in ("noisy-clifford", "pure-magic"):
        if m < 1:
            raise ConfigError("need at least one nonstabilizer input")
        if n + m > ORACLE_LIMIT:
            raise CapacityError(f"oracle comparison limited to n + m <= {ORACLE_LIMIT}")
        if sub == "noisy-clifford":
            eps = 0.3 if cfg.epsilon is None else cfg.epsilon
            inputs = _parse_inputs(cfg.inputs, m, f"magicT({eps!r})")
        else:
            inputs = _parse_inputs(cfg.inputs, m, "T")
        measured = _parse_measured(cfg.measured, n + m)
        if sub == "noisy-clifford":
            if any(q.is_pure for q in inputs):
                raise ConfigError("pure input in the mixed pathway: mixedness is 0, bound vacuous")
            rate = min(mixedness(q) for q in inputs)
            label = "" if len(measured) == n + m else "bound not guaranteed (partial measurement)"
        else:
            if any(not q.is_pure for q in inputs):
                raise ConfigError("mixed input in the pure pathway")
            rate = min(magic_mu(q) for q in inputs)
            if rate <= 0:
                raise ConfigError("stabilizer input: magic rate mu = 0 makes the bound vacuous")
            cap = measured_cap(inputs, n)
            label = ""
            if len(measured) > cap:
                if not cfg.force:
                    raise ConfigError(f"{len(measured)} measured qubits exceed the cap {cap}")
                label = f"outside the measured-qubit cap regime (cap {cap})"
        level = _level(cfg, rate, m)
        coefficient_budget(m, m if cfg.sweep else level)
        return Resolved(cfg, n, m, inputs, measured, rate, level, label)
    if sub == "iqp":
        if n < 1:
            raise ConfigError("IQP runs need at least one qubit")
        if n > CAPACITY.gowers_max_qubits:
            raise CapacityError(f"IQP brute force limited to {CAPACITY.gowers_max_qubits} qubits")
        if cfg.moments:
            return Resolved(cfg, n, 0, (), tuple(range(n)))
        eps = 0.25 if cfg.epsilon is None else cfg.epsilon
        if eps == 0:
            raise ConfigError("epsilon = 0 makes the truncation bound vacuous")
        rate = eps
        level = _level(cfg, rate, n)
        return Resolved(cfg, n, 0, (), tuple(range(n)), rate, level)
    if sub == "pbc":
        if n < 1:
            raise ConfigError("PBC runs need at least one qubit")
        if n > CAPACITY.dense_pure_qubits:
            raise CapacityError("PBC oracle limited by dense capacity")
        inputs = _parse_inputs(cfg.inputs, 1, "T")
        k = len(_parse_measured(cfg.measured, n))
        level = n if cfg.level is None else cfg.level
        if not 0 <= level <= n:
            raise ConfigError(f"level {level} outside [0, {n}]")
        return Resolved(cfg, n, 0, inputs, tuple(range(k)), None, level)
    # oracle-check
    if cfg.instance:
        if not Path(cfg.instance).is_file():
            raise ConfigError(f"instance file {cfg.instance!r} not found")
        return Resolved(cfg, 0, 0, (), ())
    if n + m > ORACLE_LIMIT:
        raise CapacityError(f"oracle checks limited to {ORACLE_LIMIT} qubits")
    return Resolved(cfg, n, m, (), ())


def trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))


# per-trial workers (top level so that process pools can pickle them) ----------


def _trial_clifford(res: Resolved, i: int) -> list[dict]:
    start = time.perf_counter()
    rng = trial_rng(res.cfg.seed, i)
    tab = random_clifford(res.n + res.m, rng)
    inst = SimInstance(res.n, res.inputs, tab, res.measured)
    exact = dense_distribution(inst)
    ev = CoefficientEvaluator(inst)
    levels = range(res.m + 1) if res.cfg.sweep else [res.level]
    rows = []
    for level in levels:
        approx = ev.distribution(level)
        err = l1_distance(approx, exact)
        bound = error_bound(res.cfg.alpha, res.rate, level)
        rows.append({
            "seed": res.cfg.seed, "circuit_index": i, "n": res.n, "m": res.m,
            "k": len(res.measured), "lambda_or_mu": res.rate, "level": level,
            "coeff_count": coefficient_budget(res.m, level), "l1_error": err,
            "bound": bound, "within_bound": err <= bound,
        })
    wall = (time.perf_counter() - start) * 1e3
    for r in rows:
        r["wall_ms"] = wall
    return rows


def _trial_iqp(res: Resolved, i: int) -> list[dict]:
    start = time.perf_counter()
    rng = trial_rng(res.cfg.seed, i)
    c = random_iqp(res.n, rng)
    if res.cfg.moments:
        p2 = second_moment_bruteforce(c)
        bound = second_moment_bound(c)
        row = {"seed": res.cfg.seed, "circuit_index": i, "n": res.n, "sum_p2": p2,
               "moment_bound": bound, "within_bound": p2 <= bound + 1e-12}
    else:
        eps = res.rate
        approx = iqp_approx_distribution(c, eps, res.level)
        exact = iqp_dense_distribution(c, eps)
        err = math.fsum(np.abs(approx - exact))
        bound = error_bound(res.cfg.alpha, eps, res.level)
        row = {"seed": res.cfg.seed, "circuit_index": i, "n": res.n, "epsilon": eps,
               "level": res.level,
               "coeff_count": sum(math.comb(res.n, j) for j in range(res.level + 1)),
               "l1_error": err, "bound": bound, "within_bound": err <= bound}
    row["wall_ms"] = (time.perf_counter() - start) * 1e3
    return [row]


def random_commuting_paulis(n: int, k: int, rng: np.random.Generator) -> list[SignedPauli]:
    """``U Z_i U^dag`` for ``i < k`` under a uniformly random Clifford ``U``."""
    from .clifford import conjugate

    u = random_clifford(n, rng)
    return [conjugate(u, SignedPauli.single(n, i, "Z")) for i in range(k)]


def dense_pbc_probability(gens: Sequence[SignedPauli], signs: Sequence[int], state: QubitInput,
                          n: int) -> float:
    """``<psi^n| prod_i (I + (-1)^sigma_i P_i)/2 |psi^n>`` by dense linear algebra."""
    dim = 2**n
    proj = np.eye(dim, dtype=complex)
    for g, b in zip(gens, signs):
        proj = proj @ (np.eye(dim) + (-1) ** int(b) * pauli_matrix(g)) / 2
    rho = DenseState.product([state.density_matrix()] * n).density_matrix()
    return float(np.real(np.trace(proj @ rho)))


def _trial_pbc(res: Resolved, i: int) -> list[dict]:
    start = time.perf_counter()
    rng = trial_rng(res.cfg.seed, i)
    n, k = res.n, len(res.measured)
    gens = random_commuting_paulis(n, k, rng)
    signs = rng.integers(0, 2, size=k).tolist()
    state = res.inputs[0]
    approx = pbc_probability(gens, signs, state, res.level, n)
    exact = dense_pbc_probability(gens, signs, state, n)
    row = {"seed": res.cfg.seed, "circuit_index": i, "n": n, "k": k, "level": res.level,
           "coeff_count": coefficient_budget(n, res.level), "p_approx": approx,
           "p_exact": exact, "abs_error": abs(approx - exact)}
    row["wall_ms"] = (time.perf_counter() - start) * 1e3
    return [row]


def _trial_oracle(res: Resolved, i: int) -> list[dict]:
    """Random instance: full-level exactness, twirl identity, IQP exactness."""
    from .dense import twirl_identity_check

    rng = trial_rng(res.cfg.seed, i)
    N = int(rng.integers(1, ORACLE_LIMIT + 1))
    m = int(rng.integers(0, min(N, 4) + 1))
    k = int(rng.integers(0, N + 1))
    inst = random_instance(rng, N - m, m, k)
    rows = []

    start = time.perf_counter()
    exact = dense_distribution(inst)
    approx = CoefficientEvaluator(inst).distribution(m)
    dev = max(abs(approx[y] - exact[y]) for y in exact)
    rows.append(_oracle_row(res, i, "full_level_exactness", N, dev, 1e-10, start))

    if m:
        start = time.perf_counter()
        a = rng.integers(0, 2, size=m).tolist()
        b = rng.integers(0, 2, size=m).tolist()
        _, dev = twirl_identity_check(inst, a, b)
        rows.append(_oracle_row(res, i, "twirl_identity", N, dev, 1e-10, start))

    start = time.perf_counter()
    c = random_iqp(min(N, 6), rng)
    eps = float(rng.uniform())
    dev = float(np.max(np.abs(iqp_approx_distribution(c, eps, c.n) - iqp_dense_distribution(c, eps))))
    rows.append(_oracle_row(res, i, "iqp_exactness", c.n, dev, 1e-10, start))
    return rows


def _oracle_row(res, i, check, n_qubits, dev, tol, start) -> dict:
    return {"seed": res.cfg.seed, "circuit_index": i, "check": check, "n_qubits": n_qubits,
            "max_deviation": dev, "passed": dev <= tol,
            "wall_ms": (time.perf_counter() - start) * 1e3}


_WORKERS: dict[str, Callable[[Resolved, int], list[dict]]] = {
    "noisy-clifford": _trial_clifford,
    "pure-magic": _trial_clifford,
    "iqp": _trial_iqp,
    "pbc": _trial_pbc,
    "oracle-check": _trial_oracle,
}


# reports ------------------------------------------------------------------------


@dataclass
class Report:
    subcommand: str
    columns: tuple[str, ...]
    config: dict
    rows: list[dict]
    summary: dict = field(default_factory=dict)
    version: str = field(default_factory=version_string)
    records: list[dict] | None = None

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", True))

    def determinism_hash(self) -> str:
        """SHA-256 over config and rows with every timing field removed."""
        rows = [{k: v for k, v in r.items() if k != "wall_ms"} for r in self.rows]
        records = [{k: v for k, v in r.items() if k != "wall_ms"} for r in self.records or []]
        config = {k: v for k, v in self.config.items() if k not in _NON_SEMANTIC}
        blob = json.dumps({"config": config, "rows": rows, "records": records},
                          sort_keys=True, default=_jsonable)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# version: {self.version}\n")
        buf.write(f"# config: {json.dumps(self.config, sort_keys=True, default=_jsonable)}\n")
        buf.write(f"# summary: {json.dumps(self.summary, sort_keys=True, default=_jsonable)}\n")
        buf.write(f"# determinism_hash: {self.determinism_hash()}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([_fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "determinism_hash": self.determinism_hash(),
            "columns": list(self.columns),
            "rows": self.rows,
        }
        if self.records is not None:
            doc["records"] = self.records
        return json.dumps(doc, indent=1, default=_jsonable)

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


# output routing and scheduling do not change results
_NON_SEMANTIC = ("out", "format", "jobs")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _run_trials(res: Resolved) -> list[dict]:
    worker = _WORKERS[res.cfg.subcommand]
    idx = range(res.cfg.trials)
    if res.cfg.jobs == 1:
        chunks = [worker(res, i) for i in idx]
    else:
        with ProcessPoolExecutor(max_workers=res.cfg.jobs) as pool:
            chunks = list(pool.map(worker, [res] * res.cfg.trials, idx))
    return [row for chunk in chunks for row in chunk]


def _fraction_summary(rows: list[dict], alpha: float) -> dict:
    guaranteed = 1 - 2 / alpha
    threshold = guaranteed - THRESHOLD_SLACK
    frac = sum(1 for r in rows if r["within_bound"]) / len(rows)
    return {"fraction_within_bound": frac, "guaranteed_fraction": guaranteed,
            "threshold": threshold, "passed": frac >= threshold}


def welford(values) -> tuple[float, float, int]:
    """Running mean and sample variance, updated in the given order."""
    mean = m2 = 0.0
    count = 0
    for v in values:
        count += 1
        delta = v - mean
        mean += delta / count
        m2 += delta * (v - mean)
    return mean, (m2 / (count - 1) if count > 1 else 0.0), count


def run(cfg: ExperimentConfig) -> Report:
    res = resolve(cfg)
    sub = cfg.subcommand
    if sub == "oracle-check" and cfg.instance:
        return _run_instance_file(res)
    key = "iqp-moments" if sub == "iqp" and cfg.moments else sub
    rows = _run_trials(res)
    report = Report(sub, COLUMNS[key], res.describe(), rows)
    if sub in ("noisy-clifford", "pure-magic"):
        if cfg.sweep:
            report.summary = _sweep_summary(rows, res)
        else:
            report.summary = _fraction_summary(rows, cfg.alpha)
        if res.label:
            report.summary["label"] = res.label
    elif key == "iqp":
        report.summary = _fraction_summary(rows, cfg.alpha)
    elif key == "iqp-moments":
        mean, var, count = welford(r["sum_p2"] for r in rows)
        se = math.sqrt(var / count)
        target = ensemble_moment_target(res.n)
        z = (mean - target) / se if se > 0 else (0.0 if mean == target else math.inf)
        report.summary = {"mean": mean, "std_error": se, "target": target, "z_score": z,
                          "bound_violations": sum(1 for r in rows if not r["within_bound"]),
                          "passed": abs(z) <= 4}
    elif sub == "pbc":
        worst = max(r["abs_error"] for r in rows)
        report.summary = {"max_abs_error": worst, "exact_level": res.level == res.n}
        if res.level == res.n:
            report.summary["passed"] = worst <= 1e-10
    else:
        failures = [r for r in rows if not r["passed"]]
        report.summary = {"checks": len(rows), "failures": len(failures),
                          "passed": not failures}
    return report


def _sweep_summary(rows: list[dict], res: Resolved) -> dict:
    means = []
    for level in range(res.m + 1):
        errs = [r["l1_error"] for r in rows if r["level"] == level]
        means.append(math.fsum(errs) / len(errs))
    monotone = all(b <= a + 1e-12 for a, b in zip(means, means[1:]))
    return {"mean_l1_by_level": means, "monotone_nonincreasing": monotone,
            "exact_at_full_level": means[-1] <= 1e-10}


def _run_instance_file(res: Resolved) -> Report:
    from .fourier import load_instance, probability_records

    inst = load_instance(Path(res.cfg.instance).read_text())
    level = inst.m if res.cfg.level is None else res.cfg.level
    if not 0 <= level <= inst.m:
        raise ConfigError(f"level {level} outside [0, {inst.m}]")
    if inst.n_qubits > CAPACITY.dense_mixed_qubits:
        raise CapacityError("instance exceeds the dense oracle capacity")
    records = probability_records(inst, level)
    exact = dense_distribution(inst)
    rows = []
    for i, (rec, y) in enumerate(zip(records, all_outcomes(inst.k))):
        dev = abs(rec["q_approx"] - exact[y])
        rows.append({"seed": res.cfg.seed, "circuit_index": i, "check": "instance_y=" + rec["y"],
                     "n_qubits": inst.n_qubits, "max_deviation": dev,
                     "passed": dev <= 1e-10 if level == inst.m else True,
                     "wall_ms": rec["wall_ms"]})
    summary = {"checks": len(rows), "failures": sum(1 for r in rows if not r["passed"]),
               "level": level, "exact_level": level == inst.m}
    summary["passed"] = summary["failures"] == 0
    return Report("oracle-check", COLUMNS["oracle-check"], res.describe(), rows, summary,
                  records=records)
