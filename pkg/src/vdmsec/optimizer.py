"""Weighted sum-rate maximization over the input covariances ``(S0, S1)``.

The max-min objective ``g0 * min(R01, R02) + g1 * R1`` is handled by the
three-case decomposition: maximize a smooth surrogate and keep its
maximizer when it is consistent with the case assumption.

All three surrogates are members of one family indexed by ``theta``:

    f(theta) = g0*theta ln|Gamma| + g0*(1-theta) ln|I + G0 S0 G0^H|
               + (g1 - g0*theta) ln|I + H1 S1 H1^H|

with ``Gamma = I + H0 S0 H0^H + H1 S1 H1^H``. ``theta = 1`` is case 1,
``theta = 0`` case 2 and ``0 < theta < 1`` case 3. The family is concave
whenever ``g1 >= g0*theta``. Surrogates and their gradients are in nats and
carry no ``1/(N+L)`` factor, so the multiplier ``mu`` of the power
constraint has the same units as the waterfilling level of the closed form.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla

from .errors import PropertyViolation
from .linalg import hermitian
from .rates import CovarianceSet, RateTuple, evaluate, rate_R1

log = logging.getLogger(__name__)

LN2 = np.log(2.0)

KKT_RESIDUAL_TOL = 1e-6
KKT_EIG_FLOOR = -1e-7
KKT_SLACK_RTOL = 1e-6
THETA_TOL = 1e-6
JUMP_WIDTH = 1e-9


@dataclass(frozen=True)
class WeightPair:
    """Non-negative weights ``(gamma0, gamma1)`` on the simplex."""

    gamma0: float
    gamma1: float
    theta: float = None

    def __post_init__(self):
        if self.gamma0 < 0 or self.gamma1 < 0 or abs(self.gamma0 + self.gamma1 - 1.0) > 1e-12:
            raise ValueError(f"weights must be non-negative and sum to 1, got {self.gamma0}, {self.gamma1}")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly inside (0, 1)")

    @classmethod
    def from_gamma1(cls, gamma1):
        return cls(1.0 - gamma1, gamma1)


@dataclass(frozen=True)
class WaterfillingSolution:
    """Powers ``p_i = [w_i / mu - 1 / lambda_i]_+`` summing to the budget."""

    mu: float
    powers: np.ndarray
    gains: np.ndarray
    weights: np.ndarray

    @property
    def water_level(self):
        """``1 / mu`` (the level for unit weights)."""
        return 1.0 / self.mu


@dataclass(frozen=True)
class AscentOptions:
    """Projected-gradient ascent settings."""

    max_iter: int = 10_000
    backtrack: float = 0.5
    armijo: float = 1e-4
    tol: float = 1e-8
    init: tuple = None


@dataclass(frozen=True)
class KktCertificate:
    """First-order optimality evidence for a covariance pair.

    ``psi`` are the dual matrices ``mu I - grad_i f``; at a KKT point they are
    PSD with ``psi_i S_i = 0``. `residual` is ``max_i ||psi_i S_i||_F`` relative
    to ``mu * P_bar``.
    """

    case: int
    theta: float
    mu: float
    residual: float
    psi: tuple = field(repr=False)
    slackness: tuple
    min_eigs: tuple
    budget: float
    iterations: int = 0
    converged: bool = True
    global_opt: bool = True

    @property
    def ok(self):
        return (
            self.converged
            and self.residual <= KKT_RESIDUAL_TOL
            and min(self.min_eigs, default=0.0) >= KKT_EIG_FLOOR
            and max((abs(s) for s in self.slackness), default=0.0) <= KKT_SLACK_RTOL * self.budget
        )


@dataclass(frozen=True)
class Solution:
    """Outcome of one covariance optimization."""

    covariances: CovarianceSet
    rates: RateTuple
    certificate: KktCertificate
    weights: WeightPair
    case: int
    theta: float = None
    consistent: bool = True
    note: str = ""
    path: tuple = field(default=(), repr=False, compare=False)
    timeshare: tuple = field(default=(), repr=False, compare=False)

    @property
    def S0(self):
        return self.covariances[0]

    @property
    def S1(self):
        return self.covariances[1]

    @property
    def objective(self):
        """``gamma0 * R0 + gamma1 * R1`` in bits per dimension."""
        return self.weights.gamma0 * self.rates.R0 + self.weights.gamma1 * self.rates.R1

    @property
    def delta(self):
        """``R01 - R02``."""
        return self.rates.extras["R01"] - self.rates.extras["R02"]


# --------------------------------------------------------------------------
# waterfilling


def waterfill(gains, budget, weights=None):
    """Weighted waterfilling ``max sum_i w_i ln(1 + lambda_i p_i)`` s.t. ``sum p = budget``.

    The active set is a prefix of the streams sorted by ``w_i * lambda_i``.
    Stream ``k`` joins once the budget exceeds
    ``sum_{j<k} (w_j / (w_k lambda_k) - 1 / lambda_j)``, a sum of
    non-negative terms, so weak streams are handled without the cancellation
    in ``budget + sum 1/lambda``. Then ``1/mu = (budget + sum 1/lambda) / sum w``.

    Parameters
    ----------
    gains : array_like
        Stream power gains ``lambda_i >= 0``.
    budget : float
        Total power, ``> 0``.
    weights : array_like, optional
        Per-stream weights ``w_i >= 0`` (default 1).

    Returns
    -------
    WaterfillingSolution

    Raises
    ------
    ValueError
        If no stream has positive weighted gain or the budget is not positive.
    """
    lam = np.asarray(gains, dtype=float).ravel()
    w = np.ones_like(lam) if weights is None else np.asarray(weights, dtype=float).ravel()
    if w.shape != lam.shape:
        raise ValueError("gains and weights must have the same length")
    if np.any(lam < 0) or np.any(w < 0):
        raise ValueError("gains and weights must be non-negative")
    if not budget > 0:
        raise ValueError("waterfilling needs a positive budget")
    key = w * lam
    # gains whose reciprocal overflows can never be worth any power
    usable = np.flatnonzero((key > 0) & (lam > 1.0 / np.finfo(float).max))
    if usable.size == 0:
        raise ValueError("no stream with positive gain: power cannot be allocated")
    order = usable[np.argsort(-key[usable], kind="stable")]
    wk, inv_lam = w[order], 1.0 / lam[order]
    with np.errstate(over="ignore", invalid="ignore"):  # inf thresholds just exclude a stream
        entry = np.array([np.sum(wk[:k] * inv_lam[k] / wk[k] - inv_lam[:k]) for k in range(order.size)])
    k = int(np.flatnonzero(entry < budget)[-1]) + 1
    wk, inv_lam = wk[:k], inv_lam[:k]
    W = wk.sum()
    # w_i/mu - 1/lambda_i with the i = j terms cancelled exactly
    cross = wk[:, None] * inv_lam[None, :] - wk[None, :] * inv_lam[:, None]
    p_act = (wk * budget + cross.sum(axis=1)) / W
    p = np.zeros_like(lam)
    p[order[:k]] = np.maximum(p_act, 0.0)
    mu = W / (budget + inv_lam.sum())
    return WaterfillingSolution(mu=mu, powers=p, gains=lam, weights=w)


# --------------------------------------------------------------------------
# surrogate objective


def _logdet(M):
    L = np.linalg.cholesky(hermitian(M))
    return 2.0 * float(np.sum(np.log(np.real(np.diag(L)))))


def _inv_pd(M):
    c = sla.cho_factor(hermitian(M), lower=True)
    return sla.cho_solve(c, np.eye(M.shape[0]))


class Surrogate:
    """The ``f(theta)`` family for fixed effective channels and weights."""

    def __init__(self, eff, weights, theta):
        self.eff = eff
        g0, g1 = weights.gamma0, weights.gamma1
        self.a = g0 * theta
        self.b = g0 * (1.0 - theta)
        self.c = g1 - g0 * theta
        self.I = np.eye(eff.N)

    @property
    def concave(self):
        return self.c >= 0

    def _parts(self, S0, S1):
        e = self.eff
        K1 = self.I + e.H1 @ S1 @ e.H1.conj().T
        Kg = self.I + e.G0 @ S0 @ e.G0.conj().T
        Gam = K1 + e.H0 @ S0 @ e.H0.conj().T
        return Gam, Kg, K1

    def value(self, S0, S1):
        Gam, Kg, K1 = self._parts(S0, S1)
        v = 0.0
        if self.a:
            v += self.a * _logdet(Gam)
        if self.b:
            v += self.b * _logdet(Kg)
        if self.c:
            v += self.c * _logdet(K1)
        return v

    def gradient(self, S0, S1):
        e = self.eff
        Gam, Kg, K1 = self._parts(S0, S1)
        D0 = np.zeros((e.l0, e.l0), dtype=complex)
        D1 = np.zeros((e.l, e.l), dtype=complex)
        if self.a:
            Gi = _inv_pd(Gam)
            D0 += self.a * (e.H0.conj().T @ Gi @ e.H0)
            D1 += self.a * (e.H1.conj().T @ Gi @ e.H1)
        if self.b:
            D0 += self.b * (e.G0.conj().T @ _inv_pd(Kg) @ e.G0)
        if self.c:
            D1 += self.c * (e.H1.conj().T @ _inv_pd(K1) @ e.H1)
        return hermitian(D0), hermitian(D1)


def _inner(A, B):
    return float(np.real(np.vdot(A, B)))


def _simplex_projection(v, total):
    """Euclidean projection of `v` onto ``{x >= 0, sum x = total}``."""
    if v.size == 0:
        return v
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / idx > 0)[-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def project_feasible(S0, S1, budget):
    """Frobenius projection onto ``{S0, S1 PSD, tr S0 + tr S1 = budget}``.

    Eigen-decompose both Hermitian parts and project the joint spectrum onto
    the scaled simplex; eigenvectors are kept.
    """
    w0, U0 = np.linalg.eigh(hermitian(S0)) if S0.size else (np.zeros(0), S0)
    w1, U1 = np.linalg.eigh(hermitian(S1)) if S1.size else (np.zeros(0), S1)
    w = _simplex_projection(np.concatenate([w0, w1]), budget)
    p0, p1 = w[: w0.size], w[w0.size:]
    return (U0 * p0) @ U0.conj().T, (U1 * p1) @ U1.conj().T


def kkt_certificate(surrogate, S0, S1, budget, case, theta, iterations=0, converged=True):
    """Recover the dual matrices from stationarity and measure KKT violations.

    ``mu`` is chosen so that the aggregate complementary slackness vanishes,
    ``mu * budget = <grad0, S0> + <grad1, S1>``.
    """
    D0, D1 = surrogate.gradient(S0, S1)
    mu = (_inner(D0, S0) + _inner(D1, S1)) / budget
    psi = (mu * np.eye(D0.shape[0]) - D0, mu * np.eye(D1.shape[0]) - D1)
    scale = mu * budget if mu > 0 else 1.0
    residual = max(
        (float(np.linalg.norm(P @ S)) for P, S in zip(psi, (S0, S1)) if S.size),
        default=0.0,
    ) / scale
    slack = tuple(_inner(P, S) for P, S in zip(psi, (S0, S1)))
    eigs = tuple(float(np.linalg.eigvalsh(P)[0]) for P in psi if P.size)
    return KktCertificate(
        case=case,
        theta=theta,
        mu=mu,
        residual=residual,
        psi=psi,
        slackness=slack,
        min_eigs=eigs,
        budget=budget,
        iterations=iterations,
        converged=converged,
        global_opt=surrogate.concave,
    )


def _stationarity(surrogate, S0, S1, D0, D1, budget):
    mu = (_inner(D0, S0) + _inner(D1, S1)) / budget
    if mu <= 0:
        return np.inf
    worst = 0.0
    for D, S in ((D0, S0), (D1, S1)):
        if not D.size:
            continue
        P = mu * np.eye(D.shape[0]) - D
        worst = max(worst, float(np.linalg.norm(P @ S)) / (mu * budget))
        worst = max(worst, -float(np.linalg.eigvalsh(P)[0]) / mu)
    return worst


def _zero_solution(eff, weights, case, theta):
    S0 = np.zeros((eff.l0, eff.l0), dtype=complex)
    S1 = np.zeros((eff.l, eff.l), dtype=complex)
    cert = KktCertificate(case, theta, 0.0, 0.0, (S0, S1), (0.0, 0.0), (), 0.0)
    return Solution(CovarianceSet((S0, S1), 0.0), evaluate(eff, S0, S1), cert, weights, case, theta)


def _case_for(theta):
    return 1 if theta == 1 else 2 if theta == 0 else 3


def ascend(eff, weights, theta, budget, opts=None):
    """Projected-gradient ascent of ``f(theta)`` over the feasible set.

    Barzilai-Borwein trial steps with Armijo backtracking along the
    projection arc. The iterate is declared converged when the recovered KKT
    system holds to ``opts.tol`` (relative); otherwise the best iterate is
    returned with ``certificate.converged = False``. Global optimality is
    only claimed when the surrogate is concave (``gamma1 >= gamma0*theta``).
    """
    opts = opts or AscentOptions()
    case = _case_for(theta)
    th = None if case == 2 else theta
    if budget == 0:
        return _zero_solution(eff, weights, case, th)
    f = Surrogate(eff, weights, theta)
    if opts.init is not None:
        S0, S1 = project_feasible(*(np.asarray(S, dtype=complex) for S in opts.init), budget)
    else:
        p = budget / eff.n_dims
        S0, S1 = project_feasible(p * np.eye(eff.l0, dtype=complex), p * np.eye(eff.l, dtype=complex), budget)

    val = f.value(S0, S1)
    D0, D1 = f.gradient(S0, S1)
    gnorm = np.sqrt(_inner(D0, D0) + _inner(D1, D1))
    t = budget / max(gnorm, 1e-300)
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        if _stationarity(f, S0, S1, D0, D1, budget) <= opts.tol:
            converged = True
            break
        while True:
            N0, N1 = project_feasible(S0 + t * D0, S1 + t * D1, budget)
            step0, step1 = N0 - S0, N1 - S1
            gain = _inner(D0, step0) + _inner(D1, step1)
            new = f.value(N0, N1)
            if new >= val + opts.armijo * gain or t < 1e-300:
                break
            t *= opts.backtrack
        if gain <= 0 or t < 1e-300:
            # no ascent direction left at working precision
            converged = _stationarity(f, S0, S1, D0, D1, budget) <= KKT_RESIDUAL_TOL
            break
        E0, E1 = f.gradient(N0, N1)
        ss = _inner(step0, step0) + _inner(step1, step1)
        sy = -(_inner(step0, E0 - D0) + _inner(step1, E1 - D1))
        S0, S1, D0, D1, val = N0, N1, E0, E1, new
        t = ss / sy if sy > 0 else 2.0 * t
    else:
        it = opts.max_iter

    cert = kkt_certificate(f, S0, S1, budget, case, th, iterations=it, converged=converged)
    if not converged:
        log.debug("ascent stopped after %d iterations (theta=%s) without convergence", it, theta)
    covs = CovarianceSet((hermitian(S0), hermitian(S1)), budget)
    return Solution(covs, evaluate(eff, *covs.matrices), cert, weights, case, th)


def ascend_case1(eff, weights, budget, opts=None):
    """Case 1: maximize ``f1`` (``theta = 1``) by projected-gradient ascent."""
    return ascend(eff, weights, 1.0, budget, opts)


def ascend_case3(eff, weights, theta, budget, opts=None):
    """Case 3: maximize ``f3`` for a fixed ``0 < theta < 1``."""
    if not 0.0 < theta < 1.0:
        raise ValueError("case 3 needs 0 < theta < 1")
    return ascend(eff, weights, theta, budget, opts)


# --------------------------------------------------------------------------
# closed forms


def maximize_case2(eff, weights, budget):
    """Case 2 in closed form: weighted waterfilling on the modes of ``G0`` and ``H1``.

    ``S0 = Vg0 diag(p0) Vg0^H`` with ``p0_i = [g0/mu - 1/lambda_g0_i]_+`` and
    ``S1 = Vh1 diag(p1) Vh1^H`` with ``p1_i = [g1/mu - 1/lambda_h1_i]_+``.
    """
    if budget == 0:
        return _zero_solution(eff, weights, 2, None)
    gains = np.concatenate([eff.lambda_g0, eff.lambda_h1])
    w = np.concatenate([np.full(eff.l0, weights.gamma0), np.full(eff.l, weights.gamma1)])
    wf = waterfill(gains, budget, w)
    p0, p1 = wf.powers[: eff.l0], wf.powers[eff.l0:]
    S0 = (eff.Vg0 * p0) @ eff.Vg0.conj().T
    S1 = (eff.Vh1 * p1) @ eff.Vh1.conj().T
    S0, S1 = hermitian(S0), hermitian(S1)
    cert = kkt_certificate(Surrogate(eff, weights, 0.0), S0, S1, budget, 2, None)
    return Solution(CovarianceSet((S0, S1), budget), evaluate(eff, S0, S1), cert, weights, 2)


def secrecy_rate_vdm(eff, budget):
    """Secrecy rate with waterfilling over the modes of ``H1`` (all power on V1).

    Returns
    -------
    rate : float
        ``sum_i log2(1 + p_i lambda_h1_i) / (N+L)``
    solution : WaterfillingSolution or None
        None when there is nothing to waterfill (``l = 0``, zero budget or
        zero gains).
    """
    if eff.l == 0 or budget == 0 or not np.any(eff.lambda_h1 > 0):
        return 0.0, None
    wf = waterfill(eff.lambda_h1, budget)
    rate = float(np.sum(np.log2(1.0 + wf.powers * wf.gains))) / eff.n_dims
    S1 = (eff.Vh1 * wf.powers) @ eff.Vh1.conj().T
    check = rate_R1(eff, hermitian(S1))
    if abs(check - rate) > 1e-9 * max(1.0, rate):
        raise PropertyViolation(f"waterfilled secrecy rate {rate} disagrees with log-det {check}")
    return rate, wf


# --------------------------------------------------------------------------
# case selection


def theta_solve(eff, weights, budget, opts=None, grid_points=32, tol=THETA_TOL, endpoints=None):
    """Find ``theta`` in (0, 1) where the case-3 maximizer has ``R01 = R02``.

    Bisection on ``delta(theta) = R01 - R02``. The ends of a
    `grid_points`-point interior grid are tried first. If they do not
    bracket a root, the gaps to ``theta = 0`` and ``theta = 1`` are tried
    using `endpoints` (the case-2 and case-1 solutions, when given), and
    finally the whole grid is scanned for a sign change. Bisection only
    evaluates interior thetas; each solve warm-starts from the nearest
    theta solved so far.

    Non-concave surrogates (``gamma1 < gamma0 * theta``) can have two
    maximizer branches, so ``delta`` may jump across zero instead of
    crossing it. When bisection closes in on such a jump the two sides are
    time-shared with the fraction that zeroes ``delta``; the result carries
    ``note = "time-sharing"`` and both parts in ``timeshare``.

    Returns
    -------
    Solution
        ``case = 3``. When no sign change is found the returned solution has
        ``consistent = False``, ``theta = None``,
        ``note = "infeasible-case-3"`` and ``path`` holding every interior
        ``(theta, Solution)`` evaluated, sorted by theta.
    """
    opts = opts or AscentOptions()
    grid = np.linspace(0.0, 1.0, grid_points + 2)[1:-1]
    cache = {}
    fixed = {}
    if endpoints is not None:
        fixed = {0.0: endpoints[0], 1.0: endpoints[1]}

    def solve(theta):
        theta = float(theta)
        if theta in fixed:
            return fixed[theta]
        if theta not in cache:
            o = opts
            if cache:
                near = min(cache, key=lambda t: abs(t - theta))
                o = replace(opts, init=(cache[near].S0, cache[near].S1))
            sol = ascend_case3(eff, weights, theta, budget, o)
            if not sol.certificate.converged:
                # retry cold in case the warm start landed in a poor basin
                cold = ascend_case3(eff, weights, theta, budget, opts)
                sol = cold if cold.certificate.residual < sol.certificate.residual else sol
            cache[theta] = sol
        return cache[theta]

    def sign(theta):
        return np.sign(solve(theta).delta)

    lo, hi = float(grid[0]), float(grid[-1])
    bracket = (lo, hi) if sign(lo) != sign(hi) else None
    if bracket is None and fixed:
        if sign(1.0) != sign(hi):
            bracket = (hi, 1.0)
        elif sign(0.0) != sign(lo):
            bracket = (0.0, lo)
    if bracket is None:
        for a, b in zip(grid[:-1], grid[1:]):
            if sign(a) != sign(b):
                bracket = (float(a), float(b))
                break
    if bracket is None:
        best = max(cache.values(), key=lambda s: s.objective)
        path = tuple(sorted(cache.items()))
        return replace(best, theta=None, consistent=False, note="infeasible-case-3", path=path)

    lo, hi = bracket
    s_lo = np.sign(solve(lo).delta)
    interior = [solve(t) for t in bracket if t not in fixed]
    best = min(interior, key=lambda s: abs(s.delta))
    for _ in range(60):
        if abs(best.delta) <= tol or hi - lo < 1e-13:
            break
        mid = 0.5 * (lo + hi)
        sol = solve(mid)
        if abs(sol.delta) < abs(best.delta):
            best = sol
        if np.sign(sol.delta) == s_lo:
            lo = mid
        else:
            hi = mid
    path = tuple(sorted(cache.items()))
    if abs(best.delta) <= tol:
        return replace(best, consistent=True, note="", path=path)
    if hi - lo < JUMP_WIDTH:
        return replace(_time_share(solve(lo), solve(hi)), path=path)
    return replace(best, consistent=False, note="theta-tolerance", path=path)


def _time_share(a, b):
    """Mixture of two solutions with ``delta`` of opposite sign that has ``delta = 0``."""
    alpha = b.delta / (b.delta - a.delta)
    mix = {k: alpha * a.rates.extras[k] + (1 - alpha) * b.rates.extras[k] for k in ("R01", "R02")}
    R1 = alpha * a.rates.R1 + (1 - alpha) * b.rates.R1
    R0 = min(mix.values())
    main = a if alpha >= 0.5 else b
    rates = RateTuple((R0, R1), extras=dict(main.rates.extras, **mix))
    return replace(
        main, rates=rates, case=3, consistent=True, note="time-sharing",
        timeshare=((alpha, a), (1 - alpha, b)),
    )


def _case1_ok(sol, tol=THETA_TOL):
    r = sol.rates.extras
    return r["R01"] <= r["R02"] + tol


def _case2_ok(sol, tol=THETA_TOL):
    r = sol.rates.extras
    return r["R02"] <= r["R01"] + tol


def _continue_to_endpoint(eff, weights, budget, start, end, opts):
    """Follow the maximizer of ``f(theta)`` from `start` toward ``theta = end``.

    Used when the surrogate at the endpoint has a whole face of maximizers:
    the limit of the interior maximizers is the one consistent with the case
    assumption, and warm-started steps ``theta = end -/+ 2^-k`` track it.
    """
    opts = opts or AscentOptions()
    sol = start
    thetas = [end - np.sign(end - 0.5) * 2.0**-k for k in range(6, 31, 3)] + [end]
    for th in thetas:
        sol = ascend(eff, weights, float(th), budget, replace(opts, init=(sol.S0, sol.S1)))
    return sol


def maximize_weighted(eff, weights, budget, opts=None):
    """Boundary point of the rate region for weights ``(gamma0, gamma1)``.

    Tries case 1 (keep if ``R01 <= R02``), then case 2 (keep if
    ``R02 <= R01``), then case 3 (``R01 = R02`` for some theta). Either
    inequality certifies optimality because each surrogate upper-bounds the
    true objective and coincides with it there; ties are accepted within
    ``THETA_TOL``. When ``delta(theta)`` keeps one sign on the whole theta
    grid the matching endpoint is re-solved by continuation from the grid
    end. If no case is consistent the best true objective among the
    candidates is returned with ``consistent = False``.
    """
    if budget == 0:
        return _zero_solution(eff, weights, 2, None)
    if weights.gamma0 == 0:
        # R0 carries no weight: the secrecy-rate corner, already closed form
        return replace(maximize_case2(eff, weights, budget), note="secrecy-corner")

    s1 = ascend_case1(eff, weights, budget, opts)
    if _case1_ok(s1):
        return replace(s1, consistent=True)
    s2 = maximize_case2(eff, weights, budget)
    if _case2_ok(s2):
        return replace(s2, consistent=True)
    s3 = theta_solve(eff, weights, budget, opts, endpoints=(s2, s1))
    if s3.consistent:
        return s3
    candidates = [s1, s2, s3]
    if s3.path:
        (th_lo, sol_lo), (th_hi, sol_hi) = s3.path[0], s3.path[-1]
        if sol_hi.delta < 0:
            c = _continue_to_endpoint(eff, weights, budget, sol_hi, 1.0, opts)
            if _case1_ok(c) and c.certificate.converged:
                return replace(c, consistent=True, note="case-1-continuation")
            candidates.append(c)
        if sol_lo.delta > 0:
            c = _continue_to_endpoint(eff, weights, budget, sol_lo, 0.0, opts)
            if _case2_ok(c) and c.certificate.converged:
                return replace(c, consistent=True, note="case-2-continuation")
            candidates.append(c)
    best = max(candidates, key=lambda s: s.objective)
    return replace(best, consistent=False, note="no-consistent-case", path=())


def greedy_max_sum_rate(eff, budget, opts=None):
    """Maximum sum-rate point (``gamma0 = gamma1 = 1/2``) by the greedy case search."""
    return maximize_weighted(eff, WeightPair(0.5, 0.5), budget, opts)


# --------------------------------------------------------------------------
# region


@dataclass(frozen=True)
class RegionSweep:
    """Per-weight boundary solutions and the upper convex hull of their rates."""

    gamma1: np.ndarray
    solutions: tuple
    points: np.ndarray
    hull: np.ndarray


def upper_hull(points):
    """Upper-right convex hull of rate points (time-sharing closure).

    The axis projections ``(0, max y)`` and ``(max x, 0)`` are added, the
    points are sorted by ``x`` and a monotone chain keeps clockwise turns.
    Returns hull vertices ordered by increasing first coordinate.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.size == 0:
        return np.zeros((0, 2))
    anchors = np.array([[0.0, pts[:, 1].max()], [pts[:, 0].max(), 0.0]])
    pts = np.vstack([pts, anchors])
    pts = pts[np.lexsort((-pts[:, 1], pts[:, 0]))]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


def hull_value(hull, x):
    """Height of the hull boundary at abscissa `x` (piecewise linear)."""
    return float(np.interp(x, hull[:, 0], hull[:, 1], right=0.0))


def rate_region_sweep(eff, budget, gamma1_grid, opts=None):
    """Solve the weighted problem on a grid of ``gamma1`` values and hull the points."""
    grid = np.asarray(sorted(set(float(g) for g in gamma1_grid)))
    sols = tuple(maximize_weighted(eff, WeightPair.from_gamma1(g), budget, opts) for g in grid)
    pts = np.array([[s.rates.R0, s.rates.R1] for s in sols])
    return RegionSweep(gamma1=grid, solutions=sols, points=pts, hull=upper_hull(pts))
