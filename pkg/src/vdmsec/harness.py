"""Monte Carlo experiment driver.

Every trial draws its channels from its own ``RngStream(seed, trial)``, so a
trial's numbers do not depend on which process computes it. Trials are the
unit of parallel work; rows are merged in ``(trial, snr, scheme)`` order and
written as CSV with a fixed float format, which makes the output
byte-identical for any worker count.
"""

import csv
import io
import json
import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import baselines, multiuser
from .channel import RngStream, make_toeplitz, sample_channel
from .errors import ConfigError, PropertyViolation, VdmError
from .optimizer import greedy_max_sum_rate, rate_region_sweep, secrecy_rate_vdm, upper_hull
from .precoder import build_precoder
from .rates import (
    effective_channels,
    equal_power_rates,
    equal_power_secrecy_rate,
    fixed_covariance_secrecy_rate,
    leakage,
)

log = logging.getLogger(__name__)

LEAKAGE_TOL = 1e-9
FLOAT_FORMAT = ".12g"
BASE_COLUMNS = ("trial", "snr_db", "scheme", "R0", "R1", "R2", "case", "kkt_residual", "leakage")

SECRECY_SCHEMES = ("vdm-waterfill", "vdm-equal", "fixed-cov-geig")
MISO_SCHEMES = ("miso-optimal", "miso-vdm")
BCC_SCHEMES = ("bcc-greedy", "bcc-equal")
MULTIUSER_SCHEMES = ("kuser-equal", "two-user-equal")
TWO_USER_MISO_SCHEMES = ("zf", "vdm-split")
SCHEMES = SECRECY_SCHEMES + MISO_SCHEMES + BCC_SCHEMES + MULTIUSER_SCHEMES + TWO_USER_MISO_SCHEMES


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment; JSON configs use these field names.

    `streams` fixes the confidential stream counts (``[l]`` or
    ``[l1, ..., lK]``; default ``L`` for one user and a round-robin split of
    ``L`` otherwise). `weights` is the ``gamma1`` grid of a rate-region
    sweep, or the power share of user 1 for the two-user MISO region.
    """

    preset: str = "custom"
    N: int = 16
    L: int = 4
    K: int = 1
    snr_grid_db: tuple = (0.0, 10.0, 20.0, 30.0, 40.0, 50.0)
    trials: int = 20
    seed: int = 0
    schemes: tuple = ("vdm-equal",)
    weights: tuple = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))
    output: str = None
    streams: tuple = None
    workers: int = 1

    def __post_init__(self):
        for name in ("snr_grid_db", "schemes", "weights"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.streams is not None:
            object.__setattr__(self, "streams", tuple(int(s) for s in self.streams))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        self.validate()

    def validate(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not self.snr_grid_db:
            raise ConfigError("snr_grid_db must not be empty")
        if list(self.snr_grid_db) != sorted(self.snr_grid_db):
            raise ConfigError("snr_grid_db must be sorted")
        if not all(np.isfinite(self.snr_grid_db)):
            raise ConfigError("snr_grid_db entries must be finite")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown or not self.schemes:
            raise ConfigError(f"unknown or empty schemes {sorted(unknown)}; choose from {list(SCHEMES)}")
        if self.N < 1 or self.L < 0 or self.K < 1:
            raise ConfigError("need N >= 1, L >= 0, K >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if any(not 0.0 <= w <= 1.0 for w in self.weights):
            raise ConfigError("weights must lie in [0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def n_dims(self):
        return self.N + self.L

    def stream_counts(self):
        if self.streams is not None:
            return self.streams
        if self.K == 1:
            return (self.L,)
        return tuple(self.L // self.K + (1 if k < self.L % self.K else 0) for k in range(self.K))

    def to_json(self):
        d = asdict(self)
        return json.dumps({k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}, indent=2)


def _grid(lo, hi, step):
    return tuple(float(x) for x in np.arange(lo, hi + step / 2, step))


PRESETS = {
    "fig7-analog": dict(N=64, L=16, schemes=MISO_SCHEMES, snr_grid_db=_grid(0, 50, 5)),
    "fig8-analog": dict(N=64, L=16, schemes=("vdm-waterfill", "vdm-equal"), snr_grid_db=_grid(0, 50, 5)),
    "sum-rate-analog": dict(N=16, L=4, schemes=BCC_SCHEMES, snr_grid_db=_grid(0, 50, 10), trials=5),
    "region-analog": dict(N=4, L=2, schemes=("bcc-greedy",), snr_grid_db=(20.0,), trials=5),
    "fig10-analog": dict(N=1, L=5, K=2, schemes=TWO_USER_MISO_SCHEMES, snr_grid_db=(20.0,),
                         trials=20, weights=tuple(np.round(np.linspace(0, 1, 21), 10))),
    "kuser-analog": dict(N=16, L=4, K=2, streams=(2, 2), schemes=("kuser-equal",), snr_grid_db=_grid(0, 50, 5)),
    "two-user-analog": dict(N=16, L=4, K=2, streams=(2, 2), schemes=("two-user-equal",),
                            snr_grid_db=_grid(0, 50, 5)),
}


def preset(name, **overrides):
    """An ExperimentConfig from a named preset with optional field overrides."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ExperimentConfig(preset=name, **{**PRESETS[name], **overrides})


def load_config(path, **overrides):
    """Read a JSON config; a ``preset`` key supplies defaults for missing fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        name = data.pop("preset", None)
        if name is not None and name in PRESETS:
            return preset(name, **data)
        return ExperimentConfig(**({"preset": name} if name else {}), **data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# result table


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FORMAT)
    return str(v)


@dataclass
class ResultTable:
    """Rows keyed by `columns`; missing values are written as empty fields."""

    columns: tuple = BASE_COLUMNS
    rows: list = field(default_factory=list)

    def add(self, **values):
        extra = set(values) - set(self.columns)
        if extra:
            raise KeyError(f"unknown columns {sorted(extra)}")
        self.rows.append(values)

    def __len__(self):
        return len(self.rows)

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row.get(c)) for c in self.columns])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    def select(self, scheme=None, ok_only=True):
        out = [r for r in self.rows if scheme is None or r["scheme"] == scheme]
        if ok_only:
            out = [r for r in out if not str(r.get("case", "")).startswith("error")]
        return out

    def errors(self):
        return [r for r in self.rows if str(r.get("case", "")).startswith("error")]

    def leakage_violations(self, tol=LEAKAGE_TOL):
        """Rows whose leakage diagnostic exceeds `tol`."""
        return [r for r in self.rows if r.get("leakage") is not None and r["leakage"] > tol]

    def mean_curve(self, scheme, column):
        """SNR grid and the trial-average of `column` for `scheme`."""
        by_snr = {}
        for r in self.select(scheme):
            if r.get(column) is not None:
                by_snr.setdefault(r["snr_db"], []).append(r[column])
        snr = np.array(sorted(by_snr))
        return snr, np.array([np.mean(by_snr[s]) for s in snr])


# --------------------------------------------------------------------------
# per-trial evaluation


def _draw(cfg, trial):
    """``g`` and ``h_1..h_K`` of one trial, always drawn in this order."""
    gen = RngStream(int(cfg.seed), trial).generator()
    g = sample_channel(cfg.L, gen)
    hs = [sample_channel(cfg.L, gen) for _ in range(max(cfg.K, 1))]
    return g, hs


class _TrialContext:
    """Lazily built precoders shared by all schemes and SNRs of a trial."""

    def __init__(self, cfg, trial):
        self.cfg = cfg
        self.g, self.hs = _draw(cfg, trial)
        self._cache = {}

    def get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def single(self):
        def build():
            cfg, h = self.cfg, self.hs[0]
            l = cfg.stream_counts()[0]
            prec = build_precoder(self.g, h, cfg.N, l)
            Th, Tg = make_toeplitz(h, cfg.N), make_toeplitz(self.g, cfg.N)
            return Th, Tg, prec, effective_channels(Th, Tg, prec)
        return self.get("single", build)


def _secrecy_row(ctx, scheme, P):
    cfg = ctx.cfg
    n = cfg.n_dims
    budget = n * P
    if scheme == "vdm-waterfill":
        _, _, _, eff = ctx.single()
        rate, wf = secrecy_rate_vdm(eff, budget)
        S1 = np.zeros((eff.l, eff.l)) if wf is None else (eff.Vh1 * wf.powers) @ eff.Vh1.conj().T
        return dict(R0=0.0, R1=rate, leakage=leakage(eff, 0.5 * (S1 + S1.conj().T)))
    if scheme == "vdm-equal":
        _, _, _, eff = ctx.single()
        S1 = (budget / eff.l) * np.eye(eff.l) if eff.l else np.zeros((0, 0))
        return dict(R0=0.0, R1=equal_power_secrecy_rate(eff, budget), leakage=leakage(eff, S1))
    if scheme == "fixed-cov-geig":
        Th, Tg = make_toeplitz(ctx.hs[0], cfg.N), make_toeplitz(ctx.g, cfg.N)
        return dict(R0=0.0, R1=fixed_covariance_secrecy_rate(Th, Tg, P * np.eye(n)))
    if scheme in MISO_SCHEMES:
        Th, Tg, prec, _ = ctx.single()
        h_row = Th.matrix[0]
        if scheme == "miso-optimal":
            bf, gain = baselines.miso_optimal_beamformer(h_row, Tg)
            phi = None if bf is None else bf.phi
        else:
            V1 = prec.V1
            gains = np.abs(h_row @ V1) ** 2 if V1.shape[1] else np.zeros(0)
            gain = float(gains.max()) if gains.size else 0.0
            phi = V1[:, int(np.argmax(gains))] if gains.size else None
        leak = 0.0 if phi is None else float(np.log2(1.0 + budget * np.linalg.norm(Tg.matrix @ phi) ** 2))
        return dict(R0=0.0, R1=baselines.miso_rate(gain, P, n), leakage=leak)
    raise ConfigError(f"scheme {scheme} not handled")


def _bcc_row(ctx, scheme, P):
    Th, Tg, prec, eff = ctx.single()
    if scheme == "bcc-equal":
        r = equal_power_rates(Th, Tg, prec, P)
        return dict(R0=r.R0, R1=r.R1, leakage=r.extras["leakage"])
    sol = greedy_max_sum_rate(eff, ctx.cfg.n_dims * P)
    return dict(
        R0=sol.rates.R0,
        R1=sol.rates.R1,
        case=f"{sol.case}" if sol.consistent else f"{sol.case}-inconsistent",
        kkt_residual=sol.certificate.residual,
        leakage=sol.rates.extras["leakage"],
    )


def _multiuser_row(ctx, scheme, P):
    cfg = ctx.cfg
    ls = cfg.stream_counts()
    if scheme == "kuser-equal":
        def build():
            inst = multiuser.MultiuserInstance(tuple(ctx.hs[: cfg.K]), cfg.N, ctx.g)
            return inst, multiuser.kuser_precoder(inst, ls)
        inst, prec = ctx.get("kuser", build)
        r = multiuser.kuser_equal_power_rates(inst, prec, P)
    else:
        if cfg.K != 2 or len(ls) != 2:
            raise ConfigError("two-user scheme needs K = 2 and two stream counts")
        prec = ctx.get("two-user", lambda: multiuser.two_user_precoder(ctx.hs[0], ctx.hs[1], cfg.N, *ls))
        r = multiuser.two_user_rates(ctx.hs[0], ctx.hs[1], prec, P)
    row = {f"R{k}": v for k, v in enumerate(r.rates)}
    row["leakage"] = r.extras["leakage"]
    return row


def _two_user_miso_gains(ctx, scheme):
    cfg = ctx.cfg
    if cfg.K != 2:
        raise ConfigError(f"{scheme} needs K = 2")
    h1, h2 = ctx.hs[0], ctx.hs[1]
    if scheme == "zf":
        def build():
            (b1, b2), gains = baselines.zf_two_user_beamformers(h1, h2, cfg.N)
            return gains, (b1, b2)
    else:
        def build():
            gains = multiuser.best_column_gains(h1, h2, cfg.N)
            _, V1, V2 = multiuser.two_user_precoder(h1, h2, cfg.N, cfg.L, cfg.L).blocks
            r1 = make_toeplitz(h1, cfg.N).matrix[0]
            r2 = make_toeplitz(h2, cfg.N).matrix[0]
            v1 = V1[:, int(np.argmax(np.abs(r1 @ V1)))]
            v2 = V2[:, int(np.argmax(np.abs(r2 @ V2)))]
            return gains, (baselines.Beamformer(v1), baselines.Beamformer(v2))
    return ctx.get(scheme, build)


def _split_row(ctx, scheme, P, share=0.5):
    """Two-user MISO rates with share `share` of ``(N+L) P`` to user 1."""
    cfg = ctx.cfg
    gains, beams = _two_user_miso_gains(ctx, scheme)
    total = cfg.n_dims * P
    r1, r2 = multiuser.power_split_rates(gains, total, cfg.n_dims, [share])[0]
    T1 = make_toeplitz(ctx.hs[0], cfg.N).matrix
    T2 = make_toeplitz(ctx.hs[1], cfg.N).matrix
    cross = [0.0, 0.0]
    for k, (b, T, p) in enumerate(((beams[0], T2, share * total), (beams[1], T1, (1 - share) * total))):
        if b is not None:
            cross[k] = float(np.log2(1.0 + p * np.linalg.norm(T @ b.phi) ** 2))
    return dict(R1=float(r1), R2=float(r2), leakage=max(cross))


def _evaluate(ctx, scheme, P):
    if scheme in SECRECY_SCHEMES or scheme in MISO_SCHEMES:
        return _secrecy_row(ctx, scheme, P)
    if scheme in BCC_SCHEMES:
        return _bcc_row(ctx, scheme, P)
    if scheme in MULTIUSER_SCHEMES:
        return _multiuser_row(ctx, scheme, P)
    return _split_row(ctx, scheme, P)


def _error_case(exc):
    return f"error:{type(exc).__name__}"


def _run_trial(cfg, trial):
    ctx = _TrialContext(cfg, trial)
    rows = []
    for snr in cfg.snr_grid_db:
        P = 10.0 ** (snr / 10.0)
        for scheme in cfg.schemes:
            base = dict(trial=trial, snr_db=snr, scheme=scheme)
            try:
                values = _evaluate(ctx, scheme, P)
            except (VdmError, np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
                log.warning("trial %d, %s dB, %s: %s", trial, snr, scheme, exc)
                rows.append({**base, "case": _error_case(exc)})
                continue
            rows.append({**base, **values})
    return rows


def _columns_for(cfg):
    n_rates = max(3, cfg.K + 1)
    return BASE_COLUMNS + tuple(f"R{k}" for k in range(3, n_rates))


def _map_trials(fn, cfg, trials, workers):
    if workers <= 1 or len(trials) <= 1:
        return [fn(cfg, t) for t in trials]
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=min(workers, len(trials)), mp_context=ctx) as pool:
        return list(pool.map(fn, [cfg] * len(trials), trials))


def run_experiment(cfg, workers=None):
    """Evaluate every scheme at every SNR on every trial.

    Failing (trial, snr, scheme) cells become rows whose ``case`` column
    reads ``error:<ExceptionName>``; the sweep always completes. The table
    is written to ``cfg.output`` when set.
    """
    workers = cfg.workers if workers is None else workers
    per_trial = _map_trials(_run_trial, cfg, list(range(cfg.trials)), workers)
    table = ResultTable(columns=_columns_for(cfg))
    for rows in per_trial:
        for r in rows:
            table.add(**r)
    if cfg.output:
        table.to_csv(cfg.output)
    return table


def check_table(table, tol=LEAKAGE_TOL):
    """Raise PropertyViolation on any leakage above `tol` or property-violation row."""
    bad = table.leakage_violations(tol)
    if bad:
        worst = max(r["leakage"] for r in bad)
        raise PropertyViolation(f"{len(bad)} rows leak information (worst {worst:.3e} > {tol:g})")
    prop = [r for r in table.errors() if r["case"] in ("error:PropertyViolation", "error:RankCertificateError")]
    if prop:
        raise PropertyViolation(f"{len(prop)} rows failed a structural certificate")


# --------------------------------------------------------------------------
# degrees of freedom


@dataclass(frozen=True)
class DofEstimate:
    """Least-squares slope of mean rate vs ``log2 P`` and the fit's RMS residual."""

    scheme: str
    column: str
    slope: float
    intercept: float
    residual: float
    n_points: int


def fit_slope(snr_db, values):
    """``(slope, intercept, rms residual)`` of `values` against ``log2(10^(snr/10))``."""
    x = np.asarray(snr_db, dtype=float) * np.log2(10.0) / 10.0
    y = np.asarray(values, dtype=float)
    if x.size < 3:
        raise ValueError(f"need at least 3 SNR points for a slope, got {x.size}")
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(res**2)))


def estimate_dof(table, tail_db=(30.0, 50.0), columns=None):
    """Per-scheme, per-rate slopes over the SNR tail ``tail_db[0] <= snr <= tail_db[1]``.

    Returns
    -------
    dict
        ``{(scheme, column): DofEstimate}`` for every rate column populated in
        the tail.

    Raises
    ------
    ValueError
        If a scheme has fewer than three SNR points in the tail.
    """
    lo, hi = tail_db
    rate_cols = columns or [c for c in table.columns if c.startswith("R")]
    out = {}
    for scheme in dict.fromkeys(r["scheme"] for r in table.rows):
        for col in rate_cols:
            snr, mean = table.mean_curve(scheme, col)
            if snr.size == 0:
                continue
            keep = (snr >= lo) & (snr <= hi)
            slope, icpt, res = fit_slope(snr[keep], mean[keep])
            out[(scheme, col)] = DofEstimate(scheme, col, slope, icpt, res, int(keep.sum()))
    return out


# --------------------------------------------------------------------------
# rate regions

REGION_COLUMNS = BASE_COLUMNS + ("weight",)


def _region_trial(cfg, trial):
    ctx = _TrialContext(cfg, trial)
    rows = []
    two_user = any(s in TWO_USER_MISO_SCHEMES for s in cfg.schemes)
    for snr in cfg.snr_grid_db:
        P = 10.0 ** (snr / 10.0)
        for scheme in cfg.schemes:
            base = dict(trial=trial, snr_db=snr, scheme=scheme)
            try:
                if two_user:
                    pts, point_rows = [], []
                    for w in cfg.weights:
                        r = _split_row(ctx, scheme, P, share=w)
                        pts.append((r["R1"], r["R2"]))
                        point_rows.append({**base, **r, "case": "point", "weight": w})
                    hull = _hull_rows(base, pts, ("R1", "R2"))
                else:
                    _, _, _, eff = ctx.single()
                    sweep = rate_region_sweep(eff, cfg.n_dims * P, cfg.weights)
                    point_rows = [
                        {
                            **base,
                            "R0": s.rates.R0,
                            "R1": s.rates.R1,
                            "case": f"{s.case}" if s.consistent else f"{s.case}-inconsistent",
                            "kkt_residual": s.certificate.residual,
                            "leakage": s.rates.extras["leakage"],
                            "weight": g1,
                        }
                        for g1, s in zip(sweep.gamma1, sweep.solutions)
                    ]
                    hull = _hull_rows(base, sweep.points, ("R0", "R1"))
            except (VdmError, np.linalg.LinAlgError, ValueError) as exc:
                rows.append({**base, "case": _error_case(exc)})
                continue
            rows.extend(point_rows)
            rows.extend(hull)
    return rows


def _hull_rows(base, points, cols):
    return [{**base, cols[0]: float(x), cols[1]: float(y), "case": "hull"} for x, y in upper_hull(points)]


def sweep_region(cfg, workers=None):
    """Region boundary points and their upper hull for every trial and SNR.

    For the single confidential message schemes the points are weighted
    sum-rate maximizers ``(R0, R1)`` over the ``gamma1`` grid in
    ``cfg.weights``; for the two-user MISO schemes (``zf``, ``vdm-split``)
    they are ``(R1, R2)`` over power shares. Point rows have ``case =
    "point"`` (or the optimizer case label) and a ``weight`` entry; hull
    vertices have ``case = "hull"``.
    """
    workers = cfg.workers if workers is None else workers
    per_trial = _map_trials(_region_trial, cfg, list(range(cfg.trials)), workers)
    table = ResultTable(columns=REGION_COLUMNS)
    for rows in per_trial:
        for r in rows:
            table.add(**r)
    if cfg.output:
        table.to_csv(cfg.output)
    return table


# --------------------------------------------------------------------------
# d.o.f. scan

DOF_COLUMNS = ("variant", "tuple", "rate", "expected", "measured", "rel_error")


def _dof_trial_rates(variant, N, L, counts, seed, trial, snr_db):
    gen = RngStream(int(seed), trial).generator()
    g = sample_channel(L, gen)
    K = len(counts) - 1
    hs = [sample_channel(L, gen) for _ in range(max(K, 1))]
    P = 10.0 ** (np.asarray(snr_db) / 10.0)
    if variant == "two-user":
        prec = multiuser.two_user_precoder(hs[0], hs[1], N, counts[1], counts[2], n_common=counts[0])
        return np.array([multiuser.two_user_rates(hs[0], hs[1], prec, p).rates for p in P])
    inst = multiuser.MultiuserInstance(tuple(hs[:K]), N, g)
    prec = multiuser.kuser_precoder(inst, counts[1:], n_common=counts[0])
    return np.array([multiuser.kuser_equal_power_rates(inst, prec, p).rates for p in P])


def measure_dof(variant, N, L, counts, seed=0, trials=5, snr_db=_grid(30, 50, 5)):
    """High-SNR slopes of every rate for one stream-count tuple, averaged over trials."""
    R = np.mean([_dof_trial_rates(variant, N, L, counts, seed, t, snr_db) for t in range(trials)], axis=0)
    return tuple(fit_slope(snr_db, R[:, k])[0] for k in range(R.shape[1]))


def dof_scan(cfg, n_tuples=5, variant=None):
    """Check achievability of sampled d.o.f. tuples end to end.

    Draws `n_tuples` tuples (seeded by ``cfg.seed``) from the region of
    `variant` (``"kuser"`` with ``cfg.K`` users or ``"two-user"``), builds the
    matching precoder and compares the measured slopes over the top of the
    SNR grid with ``l_k / (N + L)``. Zero expected slopes are compared in
    absolute terms, scaled by ``N + L``.
    """
    variant = variant or ("two-user" if "two-user-equal" in cfg.schemes else "kuser")
    if variant == "two-user":
        region = multiuser.two_user_dof_region(cfg.N, cfg.L)
    else:
        region = multiuser.kuser_dof_region(cfg.N, cfg.L, cfg.K)
    ordered = sorted(region, key=lambda d: d.stream_counts)
    rng = np.random.default_rng(int(cfg.seed))
    picks = rng.choice(len(ordered), size=min(n_tuples, len(ordered)), replace=False)
    tail = tuple(s for s in cfg.snr_grid_db if s >= 30.0) or cfg.snr_grid_db
    table = ResultTable(columns=DOF_COLUMNS)
    for i in sorted(picks):
        d = ordered[int(i)]
        slopes = measure_dof(variant, cfg.N, cfg.L, d.stream_counts, cfg.seed, cfg.trials, tail)
        for k, (meas, r) in enumerate(zip(slopes, d.normalized)):
            exp = float(r)
            err = abs(meas - exp) / exp if exp else abs(meas) * cfg.n_dims
            table.add(variant=variant, tuple="-".join(map(str, d.stream_counts)), rate=f"R{k}",
                      expected=exp, measured=meas, rel_error=err)
    if cfg.output:
        table.to_csv(cfg.output)
    return table


def with_overrides(cfg, **kw):
    """Copy of `cfg` with the non-None keyword values applied."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
