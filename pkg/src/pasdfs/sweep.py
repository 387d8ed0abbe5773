"""Parameter sweeps over the displacement amplitude and tabular output."""

from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import witnesses
from .engineering import DEFAULT_EPS, StateSpec, pasdfs_amplitudes
from .errors import AnnihilationError, DomainError, TruncationError
from .fock import pasdfs_oracle
from .moments import OracleMoments
from .phase import phase_fluctuation_U

SCHEMA = "pasdfs-sweep v1"
COLUMNS = ("k", "q", "n", "alpha_abs", "alpha_phase", "criterion", "order",
           "value", "nonclassical", "health", "oracle_delta")
SWEEP_CRITERIA = witnesses.CRITERIA + ("phase_u",)
DEFAULT_ORDERS = {"antibunching": 1, "hosps": 1, "hong_mandel": 2, "klyshko": 0,
                  "agarwal_tara": 0, "vogel": 0, "phase_u": 0}
ORACLE_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid sweep configuration; ``key`` names the offending setting."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def to_argument(criterion: str, order: int) -> int:
    """User-facing order to the internal argument (``l`` or ``z``)."""
    if criterion in ("antibunching", "hosps"):
        return order + 1
    return order


def _validate_order(criterion, order):
    if criterion in ("antibunching", "hosps"):
        ok = 1 <= order <= 9
    elif criterion == "hong_mandel":
        ok = 2 <= order <= 10 and order % 2 == 0
    elif criterion == "klyshko":
        ok = order >= 0
    else:
        ok = order == 0
    if not ok:
        raise ConfigError("order", f"order {order} is not valid for {criterion}")


@dataclass
class SweepConfig:
    ks: tuple = (0,)
    qs: tuple = (0,)
    ns: tuple = (0,)
    alpha_start: float = 0.0
    alpha_stop: float = 2.0
    alpha_steps: int = 201
    theta: float = 0.0
    criteria: tuple = (("antibunching", (1,)),)
    fmt: str = "csv"
    eps: float = DEFAULT_EPS
    oracle_check: bool = False
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.alpha_steps < 2:
            raise ConfigError("alpha-steps", "need at least 2 steps")
        if not self.alpha_stop > self.alpha_start:
            raise ConfigError("alpha-stop", "must exceed alpha-start")
        if self.alpha_start < 0:
            raise ConfigError("alpha-start", "modulus must be nonnegative")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format", f"unknown format {self.fmt!r}")
        if not (0 < self.eps <= 1e-6):
            raise ConfigError("eps", "must lie in (0, 1e-6]")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be positive")
        for name, values in (("k", self.ks), ("q", self.qs), ("n", self.ns)):
            if not values or any(v < 0 or v > 12 for v in values):
                raise ConfigError(name, "values must lie in [0, 12]")
        if not self.criteria:
            raise ConfigError("criterion", "no criteria given")
        for crit, orders in self.criteria:
            if crit not in SWEEP_CRITERIA:
                raise ConfigError("criterion", f"unknown criterion {crit!r}; "
                                  f"choose from {', '.join(SWEEP_CRITERIA)}")
            for o in orders:
                _validate_order(crit, o)

    def alphas(self) -> np.ndarray:
        return np.linspace(self.alpha_start, self.alpha_stop, self.alpha_steps)

    def points(self):
        """Sweep points in output order: spec-major, alpha-minor."""
        for k in self.ks:
            for q in self.qs:
                for n in self.ns:
                    for r in self.alphas():
                        yield k, q, n, float(r)


def fmt_float(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.11e}"


def _evaluate(psi, crit, order, moments=None):
    if crit == "phase_u":
        rep = phase_fluctuation_U(psi, moments)
        verdict = rep.antibunching_like
        return rep.U, bool(verdict), set(rep.health)
    rep = witnesses.evaluate(psi, crit, to_argument(crit, order), moments)
    return rep.value, rep.nonclassical, set(rep.health)


def evaluate_point(args):
    """All rows for one ``(k, q, n, |alpha|)`` point; pure, so safe to farm out."""
    (k, q, n, r), theta, criteria, eps, oracle_check = args
    alpha = cmath.rect(r, theta) if r else 0j
    rows = []
    try:
        psi = pasdfs_amplitudes(StateSpec(k, q, n, alpha), eps)
        error = None
    except AnnihilationError:
        error = "error:annihilated"
    except TruncationError:
        error = "error:truncation"
    oracle = None
    if error is None and oracle_check:
        opsi = pasdfs_oracle(k, q, n, alpha)
        oracle = (opsi, OracleMoments(opsi))
    for crit, orders in criteria:
        for order in orders:
            row = {"k": k, "q": q, "n": n, "alpha_abs": r, "alpha_phase": theta,
                   "criterion": crit, "order": order}
            if error is not None:
                row.update(value=math.nan, nonclassical=None, health=[error], oracle_delta=None)
            else:
                value, flag, health = _evaluate(psi, crit, order)
                delta = None
                if oracle is not None:
                    ovalue, _, _ = _evaluate(oracle[0], crit, order, oracle[1])
                    delta = abs(value - ovalue)
                    if math.isnan(value) and math.isnan(ovalue):
                        delta = 0.0
                row.update(value=value, nonclassical=flag, health=sorted(health),
                           oracle_delta=delta)
            rows.append(row)
    return rows


def run_sweep(config: SweepConfig) -> list[dict]:
    """Evaluate every point; row order never depends on ``config.jobs``."""
    tasks = [(p, config.theta, tuple(config.criteria), config.eps, config.oracle_check)
             for p in config.points()]
    if config.jobs == 1:
        chunks = map(evaluate_point, tasks)
        return [row for chunk in chunks for row in chunk]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        chunks = pool.map(evaluate_point, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs)))
        return [row for chunk in chunks for row in chunk]


def oracle_failures(rows, tol=ORACLE_TOL):
    bad = []
    for row in rows:
        d = row.get("oracle_delta")
        if d is None:
            continue
        v = row["value"]
        scale = 1.0 if math.isnan(v) else 1.0 + abs(v)
        if math.isnan(d) or d > tol * scale:
            bad.append(row)
    return bad


def _cell(key, value):
    if key in ("alpha_abs", "alpha_phase", "value", "oracle_delta"):
        return "" if value is None and key == "oracle_delta" else fmt_float(value)
    if key == "nonclassical":
        return "" if value is None else ("true" if value else "false")
    if key == "health":
        return ";".join(value)
    return str(value)


def format_rows(rows, fmt="csv") -> str:
    if fmt == "csv":
        lines = [f"# {SCHEMA}", ",".join(COLUMNS)]
        for row in rows:
            lines.append(",".join(_cell(c, row[c]) for c in COLUMNS))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {"schema": SCHEMA, "columns": list(COLUMNS),
                   "rows": [[_cell(c, row[c]) for c in COLUMNS] for row in rows]}
        return json.dumps(payload, indent=1) + "\n"
    raise DomainError(f"unknown format {fmt!r}")


def read_csv(text: str) -> list[dict]:
    """Parse the CSV written by :func:`format_rows` back into string dicts."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]
