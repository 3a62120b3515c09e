"""Time-averaged wealth growth rates for mining strategies.

A miner splits wealth W into equipment (gamma W, bought at rate c_e) and a
running reserve ((1 - gamma) W, drained at c_r per unit power per epoch).
Growth rates are per-epoch log-wealth rates; the stochastic rate averages
over the exponential first-win time, the smooth rate assumes one guaranteed
payout per period tau.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (CertainRuinError, ConvergenceError, MineconError,
                     NoRootError, NoViableStrategyError, ValidationError)
from .quadrature import adaptive_simpson
from .rewarddist import NetworkParams


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class MinerPlan:
    """A miner's budget: wealth W, split gamma, and the two cost rates.

    equipment_rate (c_e) converts currency to consensus power; running_rate
    (c_r) is the per-epoch running cost per unit of power.
    """

    wealth: float
    split: float
    equipment_rate: float
    running_rate: float

    def __post_init__(self):
        _require(math.isfinite(self.wealth) and self.wealth > 0,
                 "wealth must be positive and finite")
        _require(0.0 < self.split < 1.0, "split must lie strictly in (0, 1)")
        _require(math.isfinite(self.equipment_rate) and self.equipment_rate > 0,
                 "equipment rate must be positive and finite")
        _require(math.isfinite(self.running_rate) and self.running_rate > 0,
                 "running rate must be positive and finite")

    @property
    def power(self) -> float:
        """Consensus power purchased: gamma W c_e."""
        return self.split * self.wealth * self.equipment_rate

    @property
    def reserve(self) -> float:
        """Liquid reserve kept for running costs: (1 - gamma) W."""
        return (1.0 - self.split) * self.wealth

    @property
    def run_cost_per_epoch(self) -> float:
        """Reserve drained per epoch: gamma W c_e c_r."""
        return self.power * self.running_rate


@dataclass(frozen=True)
class GameRound:
    """One outcome of a repeated game: probability, entry cost, payout."""

    probability: float
    cost: float
    reward: float

    def __post_init__(self):
        _require(0.0 <= self.probability <= 1.0,
                 "round probability must lie in [0, 1]")
        _require(math.isfinite(self.cost) and self.cost >= 0,
                 "round cost must be nonnegative and finite")
        _require(math.isfinite(self.reward) and self.reward >= 0,
                 "round reward must be nonnegative and finite")


@dataclass(frozen=True)
class GrowthBreakdown:
    """Stochastic growth rate with its constituent parts.

    growth_rate == win_rate * (win_term + bankrupt_term) by construction.
    """

    growth_rate: float
    win_rate: float
    t_max: float
    win_term: float
    bankrupt_term: float
    conditional_reward: float


@dataclass(frozen=True)
class FeeBound:
    """Ceilings on the pool fee rate a miner should accept.

    relative_bound keeps pooled growth ahead of solo mining; the stricter
    profitability_bound keeps pooled growth positive outright. The remaining
    fields record the strategies behind the two rates.
    """

    relative_bound: float
    profitability_bound: float
    smooth_split: float
    stochastic_split: float
    smooth_growth: float
    stochastic_growth: float


class OptimalSplit(NamedTuple):
    split: float
    growth_rate: float


def tane_growth_rate(rounds: list, initial_wealth: float) -> float:
    """Time-averaged growth rate sum(q_k log((W0 - c_k + M_k)/W0)).

    Outcome probabilities must sum to 1 within 1e-12. Any positive-probability
    outcome that drives wealth to or below zero makes the rate -inf, reported
    as CertainRuinError rather than a float.
    """
    _require(math.isfinite(initial_wealth) and initial_wealth > 0,
             "initial wealth must be positive and finite")
    _require(len(rounds) > 0, "at least one game round is required")
    total_q = math.fsum(r.probability for r in rounds)
    _require(abs(total_q - 1.0) <= 1e-12,
             f"outcome probabilities sum to {total_q!r}, not 1")
    terms = []
    for r in rounds:
        if r.probability == 0.0:
            continue
        factor = (initial_wealth - r.cost + r.reward) / initial_wealth
        if factor <= 0.0:
            raise CertainRuinError(
                "an outcome with positive probability exhausts the wealth; "
                "the log-growth rate is -inf")
        terms.append(r.probability * math.log(factor))
    return math.fsum(terms)


def tane_growth_upper_bound(rounds: list, initial_wealth: float) -> float:
    """Jensen bound log(1 + E[M - c]/W0) on the time-averaged growth rate."""
    _require(math.isfinite(initial_wealth) and initial_wealth > 0,
             "initial wealth must be positive and finite")
    _require(len(rounds) > 0, "at least one game round is required")
    total_q = math.fsum(r.probability for r in rounds)
    _require(abs(total_q - 1.0) <= 1e-12,
             f"outcome probabilities sum to {total_q!r}, not 1")
    net = math.fsum(r.probability * (r.reward - r.cost) for r in rounds)
    arg = 1.0 + net / initial_wealth
    _require(arg > 0.0,
             "expected net outcome wipes out the wealth; bound undefined")
    return math.log(arg)


def wealth_trajectory(initial_wealth: float, growth_rate: float,
                      time: float) -> float:
    """Time-averaged wealth W0 exp(g t) after time epochs."""
    _require(math.isfinite(initial_wealth) and initial_wealth > 0,
             "initial wealth must be positive and finite")
    _require(math.isfinite(growth_rate), "growth rate must be finite")
    _require(math.isfinite(time) and time >= 0, "time must be nonnegative")
    return initial_wealth * math.exp(growth_rate * time)


def t_max(plan: MinerPlan) -> float:
    """Epochs until the reserve runs dry with no win: (1 - gamma)/(gamma c_e c_r)."""
    return (1.0 - plan.split) / (plan.split * plan.equipment_rate
                                 * plan.running_rate)


def win_rate_lambda(plan: MinerPlan, network: NetworkParams) -> float:
    """First-win rate E gamma W c_e / (P0 + gamma W c_e).

    network.power is the baseline P0 before this miner joins; the plan's own
    power is added to the denominator.
    """
    p = plan.power
    return network.expected_blocks * p / (network.power + p)


def _no_win_mass_series(expected_blocks: float, win_probability: float,
                        term_tol: float = 1e-16) -> float:
    # sum_w Poisson(w; E) (1-q)^w, truncated like the win-count series
    e, q = expected_blocks, win_probability
    term = math.exp(-e)
    terms = [term]
    bulk = e + 10.0 * math.sqrt(e)
    w = 0
    while True:
        w += 1
        term *= e * (1.0 - q) / w
        terms.append(term)
        if w > bulk and (term == 0.0 or term < term_tol * math.fsum(terms)):
            return math.fsum(terms)


def conditional_reward(plan: MinerPlan, network: NetworkParams) -> float:
    """Expected reward per win, M q / (1 - sum_w Poisson(w; E)(1-q)^w).

    The no-win mass collapses to exp(-E q); both that closed form and the
    truncated series are evaluated and must agree to 1e-12 (absolute, the
    sharpest the series route supports once the mass is folded into the
    denominator) before the closed form is used. Zero only in the
    degenerate M = 0 network.
    """
    p = plan.power
    q = p / (network.power + p)
    e = network.expected_blocks
    denom = -math.expm1(-e * q)
    denom_series = 1.0 - _no_win_mass_series(e, q)
    if abs(denom_series - denom) > 1e-12:
        raise MineconError(
            f"no-win mass series {1.0 - denom_series!r} disagrees with "
            f"closed form {1.0 - denom!r}")
    return network.block_reward * q / denom


def stochastic_growth_rate(plan: MinerPlan, network: NetworkParams,
                           quad_tol: float = 1e-10) -> GrowthBreakdown:
    """Expected log-wealth growth rate under stochastic block rewards.

    g = lambda * [ integral_0^{t_max} lambda e^{-lambda t}
                   log((W - t gamma W c_e c_r + R)/W) dt
                   + log(gamma) e^{-lambda t_max} ],
    with R the conditional reward per win. The win branch is integrated by
    adaptive Simpson at quad_tol; the integrand's log argument can never
    drop below gamma, which is asserted at every quadrature node.
    """
    _require(quad_tol > 0, "quad_tol must be positive")
    lam = win_rate_lambda(plan, network)
    horizon = t_max(plan)
    reward = conditional_reward(plan, network)
    gamma_ = plan.split
    drain = gamma_ * plan.equipment_rate * plan.running_rate
    rho = reward / plan.wealth
    floor = gamma_ * (1.0 - 1e-12) - 1e-12

    def integrand(t):
        arg = 1.0 - drain * t + rho
        assert np.all(arg >= floor), "log argument fell below gamma"
        return lam * np.exp(-lam * t) * np.log(arg)

    # scale of the integral, for an absolute floor under the relative
    # tolerance when the win branch integrates to nearly zero
    scale = max(abs(math.log(gamma_)), math.log1p(rho))
    win_term, _ = adaptive_simpson(integrand, 0.0, horizon, rel_tol=quad_tol,
                                   abs_tol=0.01 * quad_tol * scale)
    bankrupt_term = math.log(gamma_) * math.exp(-lam * horizon)
    g = lam * (win_term + bankrupt_term)
    return GrowthBreakdown(growth_rate=g, win_rate=lam, t_max=horizon,
                           win_term=win_term, bankrupt_term=bankrupt_term,
                           conditional_reward=reward)


def smooth_optimal_gamma(tau: float, equipment_rate: float,
                         running_rate: float) -> float:
    """Optimal split under smooth rewards: gamma*/(1-gamma*) = 1/(tau c_e c_r)."""
    _require(math.isfinite(tau) and tau > 0, "period must be positive and finite")
    _require(math.isfinite(equipment_rate) and equipment_rate > 0,
             "equipment rate must be positive and finite")
    _require(math.isfinite(running_rate) and running_rate > 0,
             "running rate must be positive and finite")
    return 1.0 / (1.0 + tau * equipment_rate * running_rate)


def _log_linear_integral(delta: float, b: float, upper: float) -> float:
    # integral_0^upper log(1 + delta - b t) dt, written to dodge the
    # cancellation in the raw antiderivative -(a - b t)(log(a - b t) - 1)/b
    # when b*upper is small: split log((1 + delta)(1 - c t)) and use the
    # exact form integral_0^upper log(1 - c t) dt = (-(1 - s) log(1 - s) - s)/c
    # with c = b/(1 + delta) and s = c*upper, both via log1p.
    c = b / (1.0 + delta)
    s = c * upper
    tail = (-(1.0 - s) * math.log1p(-s) - s) / c
    return upper * math.log1p(delta) + tail


def _smooth_growth_parts(plan: MinerPlan, network: NetworkParams,
                         tau: float) -> tuple:
    """(quadrature, antiderivative, noise floor) for the smooth growth rate.

    The noise floor is the absolute rounding level both evaluation routes
    share: forming 1 + delta - b*t costs about one epsilon of the
    integrand's magnitude at every node, so neither route can be trusted
    below that no matter how smooth the integrand is.
    """
    _require(math.isfinite(tau) and tau > 0, "period must be positive and finite")
    p = plan.power
    delta = plan.split * network.block_reward * plan.equipment_rate \
        / (network.power + p)
    b = plan.split * plan.equipment_rate * plan.running_rate
    a = 1.0 + delta
    if a - b * tau <= 0.0:
        raise CertainRuinError(
            "running costs exhaust wealth within one period; the smooth "
            "growth rate is -inf")
    closed = _log_linear_integral(delta, b, tau) / tau
    scale = max(abs(math.log1p(delta)), abs(math.log(a - b * tau)), 1e-12)
    quad, _ = adaptive_simpson(lambda t: np.log(a - b * t), 0.0, tau,
                               rel_tol=1e-12, abs_tol=1e-14 * scale * tau)
    noise = 1e-13 * (1.0 + scale)
    return quad / tau, closed, noise


def smooth_growth_rate(plan: MinerPlan, network: NetworkParams,
                       tau: float) -> float:
    """Growth rate with one guaranteed payout of M q per period tau:

    (1/tau) integral_0^tau log(1 + gamma (M c_e/(P0 + gamma W c_e)
                                          - t c_e c_r)) dt.

    Evaluated through the closed-form antiderivative of log(a - b t) and
    independently by quadrature; the two must agree to 1e-10 relative
    (with an absolute floor at the shared rounding noise, which takes
    over when the rate itself sits near zero).
    """
    quad, closed, noise = _smooth_growth_parts(plan, network, tau)
    if abs(quad - closed) > max(1e-10 * abs(closed), noise):
        raise MineconError(
            f"smooth growth rate disagreement: quadrature {quad!r} vs "
            f"antiderivative {closed!r}")
    return closed


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable, lo: float, hi: float, tol: float) -> tuple:
    # golden-section maximization; deterministic, one evaluation per step
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_gamma(wealth: float, equipment_rate: float, running_rate: float,
                   baseline_power: float, block_reward: float,
                   expected_blocks: float, grid_size: int = 1024,
                   refine_tol: float = 1e-9,
                   quad_tol: float = 1e-10) -> OptimalSplit:
    """Maximize the stochastic growth rate over the split gamma.

    Scans a uniform grid on (1e-6, 1 - 1e-6), then sharpens the best
    bracket with golden-section search down to width refine_tol. A finite
    -difference second derivative certifies the result is a local maximum
    up to quadrature noise; failure raises ConvergenceError.
    """
    _require(grid_size >= 3, "grid must hold at least 3 points")
    _require(refine_tol > 0, "refine_tol must be positive")
    network = NetworkParams(expected_blocks=expected_blocks,
                            block_reward=block_reward, power=baseline_power)

    def rate(gamma_: float) -> float:
        plan = MinerPlan(wealth=wealth, split=gamma_,
                         equipment_rate=equipment_rate,
                         running_rate=running_rate)
        return stochastic_growth_rate(plan, network,
                                      quad_tol=quad_tol).growth_rate

    edge = 1e-6
    grid = np.linspace(edge, 1.0 - edge, grid_size)
    values = np.array([rate(x) for x in grid])
    if not np.any(np.isfinite(values)):
        raise NoViableStrategyError("no split yields a finite growth rate")
    best_idx = int(np.nanargmax(values))
    lo = grid[best_idx - 1] if best_idx > 0 else grid[0]
    hi = grid[best_idx + 1] if best_idx < grid_size - 1 else grid[-1]
    split, best = _golden_max(rate, float(lo), float(hi), refine_tol)
    if values[best_idx] > best:
        split, best = float(grid[best_idx]), float(values[best_idx])

    # certify concavity at the optimum, up to quadrature noise
    h = 1e-4
    if edge < split - h and split + h < 1.0 - edge:
        fd2 = (rate(split + h) - 2.0 * best + rate(split - h)) / (h * h)
        noise = (64.0 * quad_tol * max(1.0, abs(best)) + 1e-13) / (h * h)
        if fd2 > noise:
            raise ConvergenceError(
                f"refined split {split!r} is not a local maximum "
                f"(second derivative {fd2:.3e})",
                best_estimate=best, achieved_error=fd2)
    return OptimalSplit(split=split, growth_rate=best)


def min_viable_wealth(equipment_rate: float, running_rate: float,
                      baseline_power: float, block_reward: float,
                      expected_blocks: float, bracket: tuple,
                      grid_size: int = 1024, refine_tol: float = 1e-9,
                      quad_tol: float = 1e-10) -> float:
    """Smallest wealth with nonnegative optimal growth, g*(W_min) = 0.

    bracket = (w_lo, w_hi) must straddle the sign change, g*(w_lo) < 0 <
    g*(w_hi); bisection then shrinks it until the relative width is below
    1e-6 and |g*| at the midpoint is below 1e-8.
    """
    w_lo, w_hi = bracket
    _require(0 < w_lo < w_hi and math.isfinite(w_hi),
             "bracket must satisfy 0 < w_lo < w_hi")

    def best_rate(w: float) -> float:
        return optimize_gamma(w, equipment_rate, running_rate, baseline_power,
                              block_reward, expected_blocks,
                              grid_size=grid_size, refine_tol=refine_tol,
                              quad_tol=quad_tol).growth_rate

    g_lo = best_rate(w_lo)
    g_hi = best_rate(w_hi)
    if not (g_lo < 0.0 < g_hi):
        raise NoRootError(
            f"bracket [{w_lo!r}, {w_hi!r}] does not straddle a sign change "
            f"(g* = {g_lo!r}, {g_hi!r})")

    mid = 0.5 * (w_lo + w_hi)
    g_mid = best_rate(mid)
    for _ in range(200):
        if g_mid >= 0.0:
            w_hi = mid
        else:
            w_lo = mid
        mid = 0.5 * (w_lo + w_hi)
        g_mid = best_rate(mid)
        if (w_hi - w_lo) <= 1e-6 * mid and abs(g_mid) <= 1e-8:
            return mid
    raise ConvergenceError(
        "bisection for the minimum viable wealth stalled",
        best_estimate=mid, achieved_error=abs(g_mid))


def max_pool_fee(wealth: float, equipment_rate: float, running_rate: float,
                 baseline_power: float, block_reward: float,
                 expected_blocks: float, tau: float, grid_size: int = 1024,
                 refine_tol: float = 1e-9,
                 quad_tol: float = 1e-10) -> FeeBound:
    """Fee-rate ceilings for joining a pool that smooths rewards.

    Pooled growth g_smooth - x beats solo mining while x < g_smooth - g*,
    and stays profitable outright while x < g_smooth; both bounds are
    returned together with the strategies behind them.
    """
    gamma_s = smooth_optimal_gamma(tau, equipment_rate, running_rate)
    network = NetworkParams(expected_blocks=expected_blocks,
                            block_reward=block_reward, power=baseline_power)
    smooth_plan = MinerPlan(wealth=wealth, split=gamma_s,
                            equipment_rate=equipment_rate,
                            running_rate=running_rate)
    g_smooth = smooth_growth_rate(smooth_plan, network, tau)
    opt = optimize_gamma(wealth, equipment_rate, running_rate, baseline_power,
                         block_reward, expected_blocks, grid_size=grid_size,
                         refine_tol=refine_tol, quad_tol=quad_tol)
    return FeeBound(relative_bound=g_smooth - opt.growth_rate,
                    profitability_bound=g_smooth,
                    smooth_split=gamma_s, stochastic_split=opt.split,
                    smooth_growth=g_smooth, stochastic_growth=opt.growth_rate)
