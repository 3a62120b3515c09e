"""Seeded Monte Carlo oracles that independently check the closed forms.

All randomness flows from numpy's Philox-4x64-10 counter-based generator,
keyed by (seed, stream_id); identical configs reproduce bit-identical
streams on any platform. The Poisson, Binomial, and Exponential samplers
are built here directly on the uniform bitstream (inversion against cached
cdf tables for small means, transformed rejection above), so the closed
forms under test never feed their own verification.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import growth
from .errors import ValidationError
from .rewarddist import MinerShare, NetworkParams


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


_CENSOR_CAP = 10 ** 8
# table-inversion / transformed-rejection crossover for Poisson sampling
_PTRS_THRESHOLD = 30.0
# per-table truncation: tails thinner than this are folded into the last entry
_TABLE_TAIL = 1e-18


@dataclass(frozen=True)
class SimConfig:
    """Run descriptor: seed, sample count, and a substream selector."""

    seed: int
    sample_count: int
    stream_id: int = 0

    def __post_init__(self):
        _require(0 <= self.seed < 2 ** 64, "seed must fit in 64 unsigned bits")
        _require(self.sample_count >= 1, "sample_count must be at least 1")
        _require(0 <= self.stream_id < 2 ** 64,
                 "stream_id must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SimReport:
    """Point estimate with its plain-sample-variance standard error."""

    estimate: float
    std_error: float
    samples: int
    seed: int

    def __post_init__(self):
        _require(self.samples >= 2, "a report needs at least 2 samples")
        _require(self.std_error >= 0, "standard error cannot be negative")


@dataclass(frozen=True)
class FirstWinResult:
    """First-win waiting times: summary stats plus the empirical CDF.

    empirical_cdf[k] is the fraction of trials whose first win came in
    epochs 1..grid[k]; censored counts trials aborted at the epoch cap.
    """

    report: SimReport
    grid: np.ndarray
    empirical_cdf: np.ndarray
    censored: int


@dataclass(frozen=True)
class WealthPath:
    """One simulated wealth trajectory, truncated at the ruin epoch.

    wealth[k] is equipment value plus liquid reserve after epoch k + 1
    settles; wins[k] is that epoch's block count.
    """

    wealth: np.ndarray
    wins: np.ndarray
    bankrupt: bool
    bankrupt_epoch: Optional[int]


def _generator(config: SimConfig) -> np.random.Generator:
    key = np.array([config.seed, config.stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _mean_report(values: np.ndarray, seed: int, scale: float = 1.0) -> SimReport:
    n = int(values.size)
    _require(n >= 2, "need at least 2 samples to estimate a standard error")
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    return SimReport(estimate=scale * mean,
                     std_error=scale * sd / math.sqrt(n),
                     samples=n, seed=seed)


@lru_cache(maxsize=128)
def _poisson_cdf_table(mean: float) -> np.ndarray:
    # cumulative Poisson probabilities out to the _TABLE_TAIL tail
    term = math.exp(-mean)
    cdf = [term]
    cum = term
    k = 0
    while not (k > mean and term < _TABLE_TAIL):
        k += 1
        term *= mean / k
        cum += term
        cdf.append(min(cum, 1.0))
        if k > 10_000_000:
            raise AssertionError("Poisson table failed to terminate")
    return np.array(cdf)


@lru_cache(maxsize=4096)
def _binomial_cdf_table(trials: int, q: float) -> np.ndarray:
    # cumulative Binomial(trials, q) probabilities over the full support
    if trials == 0 or q == 0.0:
        return np.ones(1)
    if q == 1.0:
        cdf = np.zeros(trials + 1)
        cdf[-1] = 1.0
        return cdf
    pmf = np.empty(trials + 1)
    pmf[0] = (1.0 - q) ** trials
    ratio = q / (1.0 - q)
    for v in range(trials):
        pmf[v + 1] = pmf[v] * (trials - v) * ratio / (v + 1)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return cdf


def poisson_sample(rng: np.random.Generator, mean: float,
                   size: int) -> np.ndarray:
    """Poisson draws: cdf-table inversion for mean <= 30, PTRS above."""
    _require(mean >= 0 and math.isfinite(mean),
             "Poisson mean must be nonnegative and finite")
    if mean == 0.0:
        return np.zeros(size, dtype=np.int64)
    if mean <= _PTRS_THRESHOLD:
        cdf = _poisson_cdf_table(mean)
        draws = np.searchsorted(cdf, rng.random(size), side="right")
        return np.minimum(draws, len(cdf) - 1).astype(np.int64)
    return _poisson_ptrs(rng, mean, size)


def _poisson_ptrs(rng: np.random.Generator, mean: float,
                  size: int) -> np.ndarray:
    # transformed rejection with squeeze (Hormann's PTRS), vectorized;
    # proposals beyond the lgamma table sit ~60 sigma out and are rejected
    b = 0.931 + 2.53 * math.sqrt(mean)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mean = math.log(mean)
    k_cap = int(mean + 60.0 * math.sqrt(mean) + 200.0)
    lgamma_table = np.array([math.lgamma(k + 1.0) for k in range(k_cap + 1)])

    out = np.empty(size, dtype=np.int64)
    filled = 0
    while filled < size:
        m = size - filled
        u = rng.random(m) - 0.5
        v = rng.random(m)
        us = 0.5 - np.abs(u)
        k = np.floor((2.0 * a / us + b) * u + mean + 0.43).astype(np.int64)

        accept = (us >= 0.07) & (v <= v_r)
        plausible = ~accept & (k >= 0) & (k <= k_cap) \
            & ~((us < 0.013) & (v > us))
        if np.any(plausible):
            kp = k[plausible]
            usp = us[plausible]
            lhs = (np.log(v[plausible]) + math.log(inv_alpha)
                   - np.log(a / (usp * usp) + b))
            rhs = kp * log_mean - mean - lgamma_table[kp]
            full = np.zeros(m, dtype=bool)
            full[np.nonzero(plausible)[0][lhs <= rhs]] = True
            accept |= full
        accept &= k >= 0
        taken = k[accept]
        out[filled:filled + taken.size] = taken
        filled += taken.size
    return out


def binomial_sample(rng: np.random.Generator, trials: np.ndarray,
                    q: float) -> np.ndarray:
    """Binomial(trials[i], q) draws, one uniform per entry.

    Entries sharing a trial count are inverted together against a cached
    cdf table; drawing order and uniform consumption depend only on the
    length of `trials`, keeping streams reproducible.
    """
    _require(0.0 <= q <= 1.0, "success probability must lie in [0, 1]")
    u = rng.random(trials.size)
    out = np.zeros(trials.size, dtype=np.int64)
    for w in np.unique(trials):
        if w == 0:
            continue
        mask = trials == w
        cdf = _binomial_cdf_table(int(w), q)
        out[mask] = np.searchsorted(cdf, u[mask], side="right")
    return out


def exponential_sample(rng: np.random.Generator, rate: float,
                       size: int) -> np.ndarray:
    """Exponential draws by inversion, -log1p(-u)/rate."""
    _require(rate > 0 and math.isfinite(rate), "rate must be positive and finite")
    return -np.log1p(-rng.random(size)) / rate


@dataclass(frozen=True)
class EpochBatch:
    """Simulated epochs; iterates as (epoch_index, blocks_total, blocks_won,
    reward) starting from epoch 1."""

    blocks_total: np.ndarray
    blocks_won: np.ndarray
    rewards: np.ndarray

    def __len__(self):
        return len(self.blocks_total)

    def __iter__(self):
        for k in range(len(self.blocks_total)):
            yield (k + 1, int(self.blocks_total[k]), int(self.blocks_won[k]),
                   float(self.rewards[k]))


def simulate_epochs(network: NetworkParams, share: MinerShare,
                    config: SimConfig) -> EpochBatch:
    """Protocol-level epoch simulation: w ~ Poisson(E), v ~ Binomial(w, q)."""
    rng = _generator(config)
    n = config.sample_count
    w = poisson_sample(rng, network.expected_blocks, n)
    v = binomial_sample(rng, w, share.win_probability)
    return EpochBatch(blocks_total=w, blocks_won=v,
                      rewards=network.block_reward * v.astype(float))


def estimate_first_win_time(network: NetworkParams, share: MinerShare,
                            config: SimConfig) -> FirstWinResult:
    """Epochs until the first won block, over config.sample_count trials.

    Trials advance in parallel sweeps: each sweep draws the epoch's block
    count per live trial, then one uniform against P(any win | w) =
    1 - (1-q)^w, which marginalizes the Binomial exactly. Wins land at the
    epoch midpoint k - 1/2, the natural continuous-time reading of "during
    epoch k"; the empirical CDF is reported on the integer epoch grid,
    where the midpoint convention drops back out. Trials still alive at
    10^8 epochs are censored and excluded from the report.
    """
    _require(share.win_probability > 0, "first win needs win probability > 0")
    rng = _generator(config)
    n = config.sample_count
    e = network.expected_blocks
    q = share.win_probability

    if e <= _PTRS_THRESHOLD:
        table_len = len(_poisson_cdf_table(e))
    else:
        table_len = int(e + 60.0 * math.sqrt(e) + 201.0)
    win_given_w = -np.expm1(np.log1p(-q) * np.arange(table_len + 1)) \
        if q < 1.0 else (np.arange(table_len + 1) > 0).astype(float)

    times = np.full(n, np.inf)
    active = np.arange(n)
    epoch = 0
    while active.size:
        epoch += 1
        if epoch > _CENSOR_CAP:
            break
        m = active.size
        w = poisson_sample(rng, e, m)
        won = rng.random(m) < win_given_w[w]
        times[active[won]] = epoch - 0.5
        active = active[~won]

    censored = int(active.size)
    wins = times[np.isfinite(times)]
    report = _mean_report(wins, config.seed)

    top = int(math.ceil(wins.max())) if wins.size else 0
    grid = np.arange(top + 1)
    ordered = np.sort(wins)
    ecdf = np.searchsorted(ordered, grid, side="right") / wins.size
    return FirstWinResult(report=report, grid=grid, empirical_cdf=ecdf,
                          censored=censored)


def _positive_poisson(rng: np.random.Generator, mean: float,
                      size: int) -> np.ndarray:
    # Poisson(mean) conditioned on >= 1
    if mean > _PTRS_THRESHOLD:
        # P(0) = e^{-mean} < 1e-13; resample the (never-seen) zeros
        draws = _poisson_ptrs(rng, mean, size)
        while np.any(draws == 0):
            zeros = draws == 0
            draws[zeros] = _poisson_ptrs(rng, mean, int(zeros.sum()))
        return draws
    cdf = _poisson_cdf_table(mean)
    floor = cdf[0]
    mapped = floor + rng.random(size) * (1.0 - floor)
    draws = np.searchsorted(cdf, mapped, side="right")
    return np.minimum(draws, len(cdf) - 1).astype(np.int64)


def round_payoffs(plan: growth.MinerPlan, network: NetworkParams,
                  config: SimConfig,
                  reward_mode: str = "conditional_mean") -> np.ndarray:
    """Per-trial log payoffs behind round_oracle (without the lambda factor).

    Each trial draws the first-win wait t ~ Exponential(lambda). Wins
    (t <= t_max) pay log((W(1 - t gamma c_e c_r) + R)/W) with R either the
    conditional mean reward or a sampled M*v, v ~ Poisson(Eq) given v >= 1;
    losses pay log(gamma).
    """
    _require(reward_mode in ("conditional_mean", "sampled"),
             f"unknown reward mode {reward_mode!r}")
    rng = _generator(config)
    n = config.sample_count
    lam = growth.win_rate_lambda(plan, network)
    horizon = growth.t_max(plan)
    drain = plan.split * plan.equipment_rate * plan.running_rate

    t = exponential_sample(rng, lam, n)
    win = t <= horizon
    payoff = np.full(n, math.log(plan.split))
    if reward_mode == "conditional_mean":
        rho = growth.conditional_reward(plan, network) / plan.wealth
        payoff[win] = np.log(1.0 - drain * t[win] + rho)
    else:
        q = plan.power / (network.power + plan.power)
        v = _positive_poisson(rng, network.expected_blocks * q,
                              int(win.sum()))
        rho = network.block_reward * v.astype(float) / plan.wealth
        payoff[win] = np.log(1.0 - drain * t[win] + rho)
    return payoff


def round_oracle(plan: growth.MinerPlan, network: NetworkParams,
                 config: SimConfig,
                 reward_mode: str = "conditional_mean") -> SimReport:
    """Formula-faithful game simulation of the stochastic growth rate.

    Averages round_payoffs; the estimate and its standard error carry the
    formula's leading factor lambda, matching the closed-form construction.
    """
    payoff = round_payoffs(plan, network, config, reward_mode)
    lam = growth.win_rate_lambda(plan, network)
    return _mean_report(payoff, config.seed, scale=lam)


def simulate_wealth_path(plan: growth.MinerPlan, network: NetworkParams,
                         horizon: int, config: SimConfig) -> WealthPath:
    """One wealth trajectory under fixed equipment and per-epoch costs.

    Settlement convention: each epoch the reserve pays the running cost
    gamma W c_e c_r, then collects M*v with v ~ Poisson(Eq); the miner is
    bankrupt at the first epoch whose settled reserve is <= 0, and mines
    through that epoch. Equipment is never sold, so reported wealth is
    gamma W plus the reserve.
    """
    _require(horizon >= 1, "horizon must be at least 1 epoch")
    rng = _generator(config)
    q = plan.power / (network.power + plan.power)
    v = poisson_sample(rng, network.expected_blocks * q, horizon)
    cost = plan.run_cost_per_epoch
    reserve = (plan.reserve - cost * np.arange(1, horizon + 1)
               + network.block_reward * np.cumsum(v))
    equipment = plan.split * plan.wealth

    ruined = np.nonzero(reserve <= 0.0)[0]
    if ruined.size:
        stop = int(ruined[0])
        return WealthPath(wealth=equipment + reserve[:stop + 1],
                          wins=v[:stop + 1], bankrupt=True,
                          bankrupt_epoch=stop + 1)
    return WealthPath(wealth=equipment + reserve, wins=v,
                      bankrupt=False, bankrupt_epoch=None)
