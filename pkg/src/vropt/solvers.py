"""Stochastic and deterministic solvers: GD, SGD, SVRG, SARAH, with fixed or
Barzilai-Borwein (BB) outer step sizes and fixed or adaptive inner-loop length.

Work accounting is in IFO units (one component gradient = 1): every snapshot
(full) gradient costs n, every stochastic inner step costs exactly 2. Trace
evaluations cost nothing.

RNG discipline: each run consumes a single numpy Generator stream in a fixed
documented order: per outer loop, first ONE uniform draw for the snapshot
index M^s (inverse CDF), then one integer draw per inner step. SGD draws one
integer per step. Identical config + seed therefore reproduces the iterate
sequence bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .averaging import AveragingScheme, sample_snapshot_index, weights
from .problems import ErmProblem, IfoCounter
from .trace import Trace, TracePoint

__all__ = [
    "FixedStep", "BarzilaiBorweinStep", "FixedLength", "AdaptiveLength",
    "SolverConfig", "OuterState", "ConfigError", "DivergenceError",
    "InnerResult", "svrg_inner", "sarah_inner", "bb_step", "run",
    "default_theta_kappa",
]


class ConfigError(ValueError):
    """Contradictory or incomplete solver configuration."""


class DivergenceError(RuntimeError):
    """Iterates became non-finite; carries the last norm and the step count."""

    def __init__(self, iterate_norm: float, steps: int, config_id: str | None = None):
        self.iterate_norm = iterate_norm
        self.steps = steps
        self.config_id = config_id
        where = f" in config {config_id!r}" if config_id else ""
        super().__init__(
            f"divergence{where}: iterate norm {iterate_norm} after {steps} steps")


@dataclass(frozen=True)
class FixedStep:
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigError(f"step size must be positive, got {self.eta}")


@dataclass(frozen=True)
class BarzilaiBorweinStep:
    """Secant-based outer step: eta_s = ||dx||^2 / (theta_kappa * <dx, dg>).

    The first two outer loops have no secant pair and use eta0. When eta0 is
    None it defaults to the lower admissible bound 1/(theta_kappa * L), except
    in tune-free mode (adaptive inner length) where it defaults to the upper
    bound 1/(theta_kappa * mu): the adaptive rule m = ceil(1/(mu * eta)) would
    otherwise start with an inner loop of length ~theta_kappa * kappa, larger
    than any reasonable budget.
    """

    theta_kappa: float
    eta0: float | None = None

    def __post_init__(self):
        if not self.theta_kappa > 0:
            raise ConfigError(f"theta_kappa must be positive, got {self.theta_kappa}")
        if self.eta0 is not None and not self.eta0 > 0:
            raise ConfigError(f"eta0 must be positive, got {self.eta0}")


@dataclass(frozen=True)
class FixedLength:
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"inner length must be >= 2, got {self.m}")


@dataclass(frozen=True)
class AdaptiveLength:
    """Inner length coupled to the step: m_s = max(2, ceil(c / (mu * eta_s)))."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"c must be positive, got {self.c}")


StepRule = FixedStep | BarzilaiBorweinStep
InnerLengthRule = FixedLength | AdaptiveLength

_SCHEMES = {
    "svrg": (AveragingScheme.UNIFORM, AveragingScheme.LAST_SVRG,
             AveragingScheme.WEIGHTED_SVRG),
    "sarah": (AveragingScheme.UNIFORM, AveragingScheme.LAST_SARAH,
              AveragingScheme.WEIGHTED_SARAH),
}


def default_theta_kappa(algorithm: str, averaging: AveragingScheme,
                        kappa: float) -> float:
    """Smallest admissible BB scaling per scheme: 4*kappa for SVRG, kappa for
    SARAH with uniform/weighted averaging, 1.5*kappa for SARAH last-iterate."""
    if algorithm == "svrg":
        return 4.0 * kappa
    if averaging is AveragingScheme.LAST_SARAH:
        return 1.5 * kappa
    return kappa


@dataclass(frozen=True)
class SolverConfig:
    """Everything one run needs besides the problem.

    Exactly one of outer_loops / ifo_budget may be left None; the run stops at
    whichever limit is hit first (budget checks happen between outer loops, so
    a run can overshoot the budget by at most one loop). GD and SGD have their
    step rules built in and reject step/inner/averaging settings.
    """

    algorithm: str  # "gd" | "sgd" | "svrg" | "sarah"
    step: StepRule | None = None
    inner: InnerLengthRule | None = None
    averaging: AveragingScheme | None = None
    outer_loops: int | None = None
    ifo_budget: int | None = None
    seed: int = 0
    name: str | None = None
    x0: np.ndarray | None = None

    @property
    def config_id(self) -> str:
        return self.name if self.name is not None else self.algorithm


@dataclass
class OuterState:
    """Sliding window of the two most recent snapshots and their full
    gradients, consumed by bb_step."""

    x_tilde_prev: np.ndarray | None = None
    x_tilde_prev2: np.ndarray | None = None
    g_prev: np.ndarray | None = None
    g_prev2: np.ndarray | None = None

    def push(self, x_tilde: np.ndarray, g: np.ndarray) -> None:
        self.x_tilde_prev2 = self.x_tilde_prev
        self.g_prev2 = self.g_prev
        self.x_tilde_prev = x_tilde
        self.g_prev = g

    @property
    def ready(self) -> bool:
        return self.x_tilde_prev2 is not None


@dataclass(frozen=True)
class InnerResult:
    x_next: np.ndarray
    snapshot_grad: np.ndarray
    snapshot_index: int  # the sampled M^s


def bb_step(state: OuterState, theta_kappa: float,
            constants: tuple[float, float] | None = None) -> float | None:
    """Barzilai-Borwein outer step from the stored secant pair.

    Returns eta_s = ||dx||^2 / (theta_kappa * <dx, dg>), or None when the
    snapshots coincide (caller should reuse the previous step). When problem
    constants (L, mu) are given, the result is asserted to lie inside
    [1/(theta_kappa*L), 1/(theta_kappa*mu)], which strong convexity and
    smoothness guarantee.

    Raises:
        ValueError: missing snapshots, or a non-positive secant product
            (impossible for a strongly convex objective with finite state).
    """
    if not state.ready or state.g_prev2 is None:
        raise ValueError("bb_step needs two snapshots with stored gradients")
    dx = state.x_tilde_prev - state.x_tilde_prev2
    sq = float(dx @ dx)
    if sq == 0.0:
        return None
    dg = state.g_prev - state.g_prev2
    den = float(dx @ dg)
    if not den > 0.0:
        raise ValueError(
            f"secant product <dx, dg> = {den} is not positive; "
            "strong convexity is violated (non-finite state or a bug)")
    eta = sq / (theta_kappa * den)
    if constants is not None:
        big_l, mu = constants
        lo = 1.0 / (theta_kappa * big_l)
        hi = 1.0 / (theta_kappa * mu)
        tol = 1e-9
        if not (lo * (1.0 - tol) <= eta <= hi * (1.0 + tol)):
            raise AssertionError(
                f"BB step {eta} outside guaranteed interval [{lo}, {hi}]")
    return eta


def _check_finite(x: np.ndarray, steps: int, config_id: str | None) -> None:
    # ||x||^2 enters every regularized objective, so its overflow already
    # makes f(x) non-finite even while the components stay representable
    with np.errstate(over="ignore", invalid="ignore"):
        sq = float(x @ x)
    if not math.isfinite(sq) or not np.all(np.isfinite(x)):
        raise DivergenceError(float(np.linalg.norm(x)), steps, config_id)


def _resolve_scheme(algorithm: str, averaging: AveragingScheme) -> None:
    allowed = _SCHEMES[algorithm]
    if averaging not in allowed:
        raise ConfigError(
            f"averaging {averaging.name} is not valid for {algorithm}; "
            f"choose one of {[a.name for a in allowed]}")


def _svrg_steps(problem: ErmProblem, x0: np.ndarray, g: np.ndarray, eta: float,
                steps: int, rng: np.random.Generator, counter: IfoCounter,
                config_id: str | None = None) -> np.ndarray:
    """Run `steps` corrected-gradient updates anchored at snapshot x0."""
    x = x0.copy()
    for k in range(steps):
        i = int(rng.integers(problem.n))
        v = problem.grad_component(i, x, counter) \
            - problem.grad_component(i, x0, counter) + g
        x -= eta * v
        _check_finite(x, k + 1, config_id)
    return x


def _sarah_steps(problem: ErmProblem, x0: np.ndarray, g: np.ndarray, eta: float,
                 upto: int, rng: np.random.Generator, counter: IfoCounter,
                 config_id: str | None = None) -> np.ndarray:
    """Run the recursive-estimator chain up to iterate x_upto (0 = snapshot;
    1 = the deterministic full-gradient step; each further step costs 2 IFO)."""
    if upto == 0:
        return x0.copy()
    x_prev = x0
    v = g.copy()
    x = x0 - eta * v
    _check_finite(x, 1, config_id)
    for k in range(1, upto):
        i = int(rng.integers(problem.n))
        v += problem.grad_component(i, x, counter) \
            - problem.grad_component(i, x_prev, counter)
        x_prev = x
        x = x - eta * v
        _check_finite(x, k + 1, config_id)
    return x


def svrg_inner(problem: ErmProblem, x0: np.ndarray, eta: float, m: int,
               averaging: AveragingScheme, rng: np.random.Generator,
               counter: IfoCounter) -> InnerResult:
    """One corrected-gradient outer loop with lazy snapshot selection.

    Computes the anchor gradient g = grad f(x0) (n IFO), draws the snapshot
    index M from the averaging pmf over {0..m}, runs exactly M inner updates
    x <- x - eta * (grad f_i(x) - grad f_i(x0) + g) (2 IFO each), and returns
    x_M with g and M. Deterministic given the generator state.

    Raises:
        DivergenceError: a non-finite iterate appeared.
    """
    _resolve_scheme("svrg", averaging)
    g = problem.full_grad(x0, counter)
    w = weights(averaging, m, problem.mu, eta)
    snap = sample_snapshot_index(w, rng)
    x = _svrg_steps(problem, x0, g, eta, snap, rng, counter)
    return InnerResult(x, g, snap)


def sarah_inner(problem: ErmProblem, x0: np.ndarray, eta: float, m: int,
                averaging: AveragingScheme, rng: np.random.Generator,
                counter: IfoCounter) -> InnerResult:
    """One recursive-estimator outer loop with lazy snapshot selection.

    v_0 = grad f(x0) (n IFO) and x_1 = x0 - eta*v_0 cost no extra IFO; each
    recursive update v <- v + grad f_i(x_k) - grad f_i(x_{k-1}) costs 2. With
    sampled index M, the loop runs max(M-1, 0) recursive updates and returns
    x_M.

    Raises:
        DivergenceError: a non-finite iterate appeared.
    """
    _resolve_scheme("sarah", averaging)
    g = problem.full_grad(x0, counter)
    w = weights(averaging, m, problem.mu, eta)
    snap = sample_snapshot_index(w, rng)
    x = _sarah_steps(problem, x0, g, eta, snap, rng, counter)
    return InnerResult(x, g, snap)


def _validate(problem: ErmProblem, config: SolverConfig) -> None:
    if config.algorithm not in ("gd", "sgd", "svrg", "sarah"):
        raise ConfigError(f"unknown algorithm {config.algorithm!r}")
    if config.outer_loops is None and config.ifo_budget is None:
        raise ConfigError("set outer_loops, ifo_budget, or both")
    if config.outer_loops is not None and config.outer_loops < 0:
        raise ConfigError(f"outer_loops must be >= 0, got {config.outer_loops}")
    if config.ifo_budget is not None and config.ifo_budget < 0:
        raise ConfigError(f"ifo_budget must be >= 0, got {config.ifo_budget}")
    if config.x0 is not None and np.asarray(config.x0).shape != (problem.d,):
        raise ConfigError(f"x0 must have shape ({problem.d},)")
    if config.algorithm in ("gd", "sgd"):
        for field_name in ("step", "inner", "averaging"):
            if getattr(config, field_name) is not None:
                raise ConfigError(
                    f"{field_name} is not configurable for {config.algorithm} "
                    "(its rule is built in)")
        return
    if config.step is None or config.inner is None or config.averaging is None:
        raise ConfigError(
            f"{config.algorithm} needs step, inner, and averaging rules")
    _resolve_scheme(config.algorithm, config.averaging)
    if problem.mu <= 0:
        raise ConfigError("variance-reduced solvers require mu > 0")
    if isinstance(config.inner, AdaptiveLength) and \
            not isinstance(config.step, BarzilaiBorweinStep):
        raise ConfigError("adaptive inner length requires the BB step rule "
                          "(it is derived from eta_s)")


def _resolve_eta0(step: BarzilaiBorweinStep, inner: InnerLengthRule,
                  big_l: float, mu: float) -> float:
    if step.eta0 is not None:
        return step.eta0
    if isinstance(inner, AdaptiveLength):
        return 1.0 / (step.theta_kappa * mu)
    return 1.0 / (step.theta_kappa * big_l)


def run(problem: ErmProblem, config: SolverConfig, f_star: float | None = None,
        evaluate: bool = True) -> Trace:
    """Run one solver configuration and return its trace.

    Outer loop s resolves eta_s (fixed, or BB once two snapshot gradients
    exist; the first two loops use eta0), resolves m_s (fixed, or
    ceil(c/(mu*eta_s))), draws the snapshot index, runs the inner loop, and
    records a TracePoint. GD takes one full-gradient step per loop with
    eta = 1/L; SGD runs one epoch of n single-sample steps per loop with the
    decaying step 0.05/(L*(epoch+1)).

    Evaluation (gap needs f_star; grad_sq always) reads the snapshot without
    charging IFO or consuming RNG draws, so evaluate=False changes nothing
    about the iterate sequence.

    Raises:
        ConfigError: contradictory configuration for this problem.
        DivergenceError: non-finite iterate, annotated with the config id.
    """
    _validate(problem, config)
    big_l, mu, _ = problem.constants()
    n = problem.n
    cid = config.config_id
    rng = np.random.default_rng(config.seed)
    counter = IfoCounter()
    x = np.zeros(problem.d) if config.x0 is None \
        else np.asarray(config.x0, dtype=np.float64).copy()

    points = []

    def record(s: int, eta_s: float | None, m_s: int | None,
               snap: int | None) -> None:
        gap = grad_sq = None
        if evaluate:
            g_eval = problem.full_grad(x)  # uncharged, consumes no RNG
            with np.errstate(over="ignore", invalid="ignore"):
                grad_sq = float(g_eval @ g_eval)
                value = problem.value(x) if f_star is not None else None
            if not math.isfinite(grad_sq) or \
                    (value is not None and not math.isfinite(value)):
                raise DivergenceError(float(np.linalg.norm(x)), s, cid)
            if value is not None:
                gap = value - f_star
        points.append(TracePoint(s, eta_s, m_s, snap, counter.count, gap, grad_sq))

    record(0, None, None, None)
    state = OuterState()
    eta_prev: float | None = None
    s = 0
    while True:
        if config.outer_loops is not None and s >= config.outer_loops:
            break
        if config.ifo_budget is not None and counter.count >= config.ifo_budget:
            break
        s += 1
        try:
            if config.algorithm == "gd":
                eta_s = 1.0 / big_l
                x = x - eta_s * problem.full_grad(x, counter)
                _check_finite(x, s, cid)
                record(s, eta_s, 1, 1)
                continue
            if config.algorithm == "sgd":
                eta_s = 0.05 / (big_l * s)  # epoch index n_e = s - 1
                for k in range(n):
                    i = int(rng.integers(n))
                    x -= eta_s * problem.grad_component(i, x, counter)
                    _check_finite(x, k + 1, cid)
                record(s, eta_s, n, n)
                continue

            # variance-reduced path: snapshot gradient first, since the BB
            # secant for loop s uses grad f at the two latest snapshots
            g = problem.full_grad(x, counter)
            _check_finite(g, s, cid)
            state.push(x, g)
            if isinstance(config.step, FixedStep):
                eta_s = config.step.eta
            else:
                if s <= 2 or not state.ready:
                    eta_s = _resolve_eta0(config.step, config.inner, big_l, mu)
                else:
                    eta_s = bb_step(state, config.step.theta_kappa, (big_l, mu))
                    if eta_s is None:  # snapshot did not move; keep the old step
                        eta_s = eta_prev if eta_prev is not None else \
                            _resolve_eta0(config.step, config.inner, big_l, mu)
            eta_prev = eta_s
            if isinstance(config.inner, FixedLength):
                m_s = config.inner.m
            else:
                m_s = max(2, math.ceil(config.inner.c / (mu * eta_s)))
            w = weights(config.averaging, m_s, mu, eta_s)
            snap = sample_snapshot_index(w, rng)
            if config.algorithm == "svrg":
                x = _svrg_steps(problem, x, g, eta_s, snap, rng, counter, cid)
            else:
                x = _sarah_steps(problem, x, g, eta_s, snap, rng, counter, cid)
            record(s, eta_s, m_s, snap)
        except DivergenceError as err:
            if err.config_id is None:
                raise DivergenceError(err.iterate_norm, err.steps, cid) from None
            raise
    return Trace(cid, n, tuple(points))


def with_budget(config: SolverConfig, ifo_budget: int,
                seed: int | None = None) -> SolverConfig:
    """Copy a config with a new IFO budget (and optionally a new seed)."""
    kwargs = {"ifo_budget": ifo_budget}
    if seed is not None:
        kwargs["seed"] = seed
    return replace(config, **kwargs)
