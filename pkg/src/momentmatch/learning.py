"""Dataset likelihoods, gradients, moment-matching reports and ML fitting.

All four variants share one form.  With ``data clamp`` = the row's COND and
OBS assignment and ``model clamp`` = its COND assignment alone,

    L(theta) = mean_i [ A(data clamp_i, theta) - A(model clamp_i, theta) ]

and the gradient is the difference of two averaged expectations of T: the
data side (hidden variables filled in by the model posterior) minus the model
side (conditioning variables filled in from the data).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import Dataset, FamilySpec, Role, as_theta
from .errors import DegenerateClampError
from .inference import grad_log_partition

log = logging.getLogger(__name__)


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    DIVERGING = "diverging"


@dataclass(frozen=True)
class Init:
    kind: str = "random"
    scale: float = 0.01
    seed: int = 42

    def __post_init__(self):
        if self.kind not in ("zeros", "random"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("init scale must be >= 0")

    @classmethod
    def zeros(cls) -> "Init":
        return cls("zeros")

    @classmethod
    def random(cls, scale: float = 0.01, seed: int = 42) -> "Init":
        return cls("random", scale, seed)

    def theta0(self, d: int) -> np.ndarray:
        if self.kind == "zeros":
            return np.zeros(d)
        return np.random.default_rng(self.seed).normal(0.0, self.scale, size=d)


@dataclass(frozen=True)
class LineSearch:
    initial: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    # after an accepted initial step, keep doubling while Armijo holds and L improves
    expand: bool = True
    min_step: float = 1e-20
    max_doublings: int = 60
    # absolute band in which changes of L count as rounding noise
    noise: float = 1e-12


@dataclass(frozen=True)
class FitOptions:
    tol_grad_inf: float = 1e-8
    max_iters: int = 5000
    init: Init | None = None  # None: RANDOM(0.01, 42) with hidden variables, ZEROS otherwise
    step: LineSearch = field(default_factory=LineSearch)
    theta_guard: float = 1e3

    def __post_init__(self):
        if not self.tol_grad_inf > 0:
            raise ValueError("tol_grad_inf must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def resolve_init(self, spec: FamilySpec) -> Init:
        if self.init is not None:
            return self.init
        return Init.random() if spec.variant().has_hidden else Init.zeros()


@dataclass(frozen=True, eq=False)
class MomentReport:
    data_side: np.ndarray
    model_side: np.ndarray
    residual_inf: float


@dataclass(frozen=True, eq=False)
class FitResult:
    theta_hat: np.ndarray
    status: Status
    loglik_trace: list[float]
    grad_inf_final: float
    mm_residual_inf: float
    iterations: int
    moment: MomentReport | None = None

    @property
    def loglik_final(self) -> float:
        return self.loglik_trace[-1]


class Objective:
    """Batched evaluation of L and its gradient for one (spec, dataset) pair.

    Clamp masks are built once; each evaluation is a masked log-sum-exp over
    the enumeration table.  When there are no COND variables the model side is
    a single row (``A(theta)`` is shared by every datum).
    """

    def __init__(self, spec: FamilySpec, dataset: Dataset):
        dataset.validate(spec)
        self.spec = spec
        self.n = dataset.n
        self.data_mask = np.stack([spec.clamp_mask(r) for r in dataset.rows])
        if spec.variant().has_cond:
            self.model_mask = np.stack([spec.clamp_mask(spec.cond_part(r)) for r in dataset.rows])
        else:
            self.model_mask = np.ones((1, spec.num_configs), dtype=bool)

    def _lse(self, s, mask):
        S = np.where(mask, s, -np.inf)
        m = S.max(axis=1)
        finite = np.isfinite(m)
        shift = np.where(finite, m, 0.0)
        with np.errstate(divide="ignore"):
            lse = shift + np.log(np.exp(S - shift[:, None]).sum(axis=1))
        return np.where(finite, lse, -np.inf), S

    def value(self, theta) -> float:
        s = self.spec.log_h + self.spec.T @ theta
        data, _ = self._lse(s, self.data_mask)
        if np.any(data == -np.inf):
            return -np.inf
        model, _ = self._lse(s, self.model_mask)
        return float(data.sum() / self.n - model.sum() / model.shape[0])

    def _expect(self, lse, S):
        if np.any(lse == -np.inf):
            raise DegenerateClampError("a data row has no allowed configuration")
        P = np.exp(S - lse[:, None])
        return (P @ self.spec.T).sum(axis=0) / P.shape[0]

    def value_and_grad(self, theta) -> tuple[float, np.ndarray]:
        s = self.spec.log_h + self.spec.T @ theta
        data, Sd = self._lse(s, self.data_mask)
        model, Sm = self._lse(s, self.model_mask)
        g = self._expect(data, Sd) - self._expect(model, Sm)
        return float(data.sum() / self.n - model.sum() / model.shape[0]), g


def log_likelihood(spec: FamilySpec, dataset: Dataset, theta) -> float:
    """Mean (conditional / marginal) log-likelihood of the dataset."""
    return Objective(spec, dataset).value(as_theta(spec, theta))


def grad_log_likelihood(spec: FamilySpec, dataset: Dataset, theta) -> np.ndarray:
    return Objective(spec, dataset).value_and_grad(as_theta(spec, theta))[1]


def moment_report(spec: FamilySpec, dataset: Dataset, theta) -> MomentReport:
    """Both sides of the generalized moment-matching condition at ``theta``.

    data_side: average over rows of E[T | row], hidden variables drawn from
    the model posterior.  model_side: average over rows of E[T | cond(row)],
    or the unconditional E[T] when nothing is conditioned on.
    """
    dataset.validate(spec)
    theta = as_theta(spec, theta)
    data_side = np.zeros(spec.stat_dim)
    for row in dataset.rows:
        data_side = data_side + grad_log_partition(spec, row, theta)
    data_side = data_side / dataset.n
    if spec.names_with_role(Role.COND):
        model_side = np.zeros(spec.stat_dim)
        for row in dataset.rows:
            model_side = model_side + grad_log_partition(spec, spec.cond_part(row), theta)
        model_side = model_side / dataset.n
    else:
        model_side = grad_log_partition(spec, {}, theta)
    return MomentReport(data_side, model_side, float(np.max(np.abs(data_side - model_side))))


def _line_search(obj, theta, L, g, ls: LineSearch):
    gg = float(g @ g)
    s = ls.initial
    exact = True
    while True:
        cand = theta + s * g
        Lc = obj.value(cand)
        if Lc >= L + ls.armijo * s * gg:
            break
        # Near the optimum the change in L is below float resolution; fall back
        # to the derivative form of the Armijo test (approximate Wolfe).
        if Lc >= L - ls.noise:
            _, gc = obj.value_and_grad(cand)
            if gc @ g >= (2 * ls.armijo - 1) * gg:
                exact = False
                break
        s *= ls.backtrack
        if s < ls.min_step:
            return None
    if ls.expand and exact and s == ls.initial:
        for _ in range(ls.max_doublings):
            s2 = 2.0 * s
            c2 = theta + s2 * g
            L2 = obj.value(c2)
            if not (L2 >= L + ls.armijo * s2 * gg and L2 > Lc):
                break
            s, cand, Lc = s2, c2, L2
    return cand, Lc


def _escapes(obj, theta, L, direction, guard) -> bool:
    # The likelihood does not drop when pushed past the guard along the last
    # ascent direction: the supremum lies at infinity.
    scale = np.max(np.abs(direction))
    if not scale > 0:
        return False
    probe = theta + (guard + np.max(np.abs(theta))) * direction / scale
    return obj.value(probe) >= L


def recession_direction(spec: FamilySpec, dataset: Dataset, tol: float = 1e-7) -> np.ndarray | None:
    """Direction along which a fully observed likelihood rises forever, or None.

    With no hidden variables L is concave, and it has no finite maximizer
    exactly when some v satisfies v.(T(row) - T(c)) >= 0 for every row and
    every allowed configuration c sharing the row's conditioning values, with
    at least one strict inequality.  Solved as a bounded linear program.
    """
    if spec.variant().has_hidden:
        raise ValueError("recession test applies to fully observed variants only")
    dataset.validate(spec)
    allowed = np.isfinite(spec.log_h)
    diffs = []
    for row in dataset.rows:
        a = spec.flat_index(row)
        others = np.flatnonzero(spec.clamp_mask(spec.cond_part(row)) & allowed)
        diffs.append(spec.T[a] - spec.T[others[others != a]])
    D = np.concatenate(diffs)
    if D.shape[0] == 0:
        return None
    res = linprog(
        -D.sum(axis=0), A_ub=-D, b_ub=np.zeros(D.shape[0]),
        bounds=[(-1.0, 1.0)] * spec.stat_dim, method="highs",
    )
    if res.status != 0 or -res.fun <= tol:
        return None
    return res.x


def fit(spec: FamilySpec, dataset: Dataset, opts: FitOptions | None = None) -> FitResult:
    """Maximize the mean log-likelihood by gradient ascent with backtracking.

    Stops with CONVERGED once the gradient sup-norm drops below
    ``tol_grad_inf``, DIVERGING when ``theta`` leaves the ``theta_guard`` box or
    no finite maximizer exists, MAX_ITERS otherwise.  Existence is decided by
    ``recession_direction`` for fully observed variants; with hidden variables
    the likelihood is probed past the guard along the last ascent direction.
    """
    opts = opts or FitOptions()
    obj = Objective(spec, dataset)
    hidden = spec.variant().has_hidden

    def at_infinity():
        if hidden:
            return _escapes(obj, theta, L, direction, opts.theta_guard)
        return recession_direction(spec, dataset) is not None

    theta = opts.resolve_init(spec).theta0(spec.stat_dim)
    L, g = obj.value_and_grad(theta)
    trace = [L]
    status = Status.MAX_ITERS
    direction = g
    iters = 0
    while True:
        gnorm = float(np.max(np.abs(g)))
        if np.max(np.abs(theta)) > opts.theta_guard:
            status = Status.DIVERGING
            break
        if gnorm <= opts.tol_grad_inf:
            status = Status.DIVERGING if at_infinity() else Status.CONVERGED
            break
        if iters >= opts.max_iters:
            if at_infinity():
                status = Status.DIVERGING
            break
        found = _line_search(obj, theta, L, g, opts.step)
        if found is None:
            log.warning("line search stalled at iteration %d (|grad|=%.3g)", iters, gnorm)
            break
        new_theta, _ = found
        direction = new_theta - theta
        theta = new_theta
        L, g = obj.value_and_grad(theta)
        trace.append(L)
        iters += 1

    report = moment_report(spec, dataset, theta)
    return FitResult(
        theta_hat=theta,
        status=status,
        loglik_trace=trace,
        grad_inf_final=gnorm,
        mm_residual_inf=report.residual_inf,
        iterations=iters,
        moment=report,
    )


def gradient_check(spec: FamilySpec, dataset: Dataset, theta, eps: float = 1e-5) -> float:
    """Max over coordinates of |analytic - central difference| / max(1, |analytic|)."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    obj = Objective(spec, dataset)
    theta = as_theta(spec, theta)
    _, analytic = obj.value_and_grad(theta)
    worst = 0.0
    for j in range(spec.stat_dim):
        e = np.zeros_like(theta)
        e[j] = eps
        numeric = (obj.value(theta + e) - obj.value(theta - e)) / (2 * eps)
        worst = max(worst, abs(analytic[j] - numeric) / max(1.0, abs(analytic[j])))
    return worst
