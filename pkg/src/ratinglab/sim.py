"""Seeded Monte-Carlo simulation of a player pool with one strategic player.

Each player carries a hidden true rating (which may drift) and a visible
current rating updated by the rating system.  Player 0 is the attacker and
picks its opponent by strategy; the remaining players pair uniformly at
random among themselves, which keeps the pool calibrated and isolates the
attacker's edge.  When a P band is configured it filters the attacker's
choice set to opponents P-close to the attacker's current rating
(matchmaking only sees current ratings).

Randomness comes from two PCG64 generators spawned deterministically from
the config seed: an environment stream for the initial ratings and the
true-rating drift, and a decision stream for matchmaking and match
outcomes.  True ratings evolve only through drift, so two runs with the
same seed but different attacker strategies see identical pools and
identical true-rating trajectories; the strategy comparison then measures
pure rating inflation rather than where the random walk happened to wander.
Decision-stream draws are consumed in a fixed order per round:

  1. attacker's own-rating estimate noise (only if estimate_noise_sd > 0),
  2. attacker opponent selection (only for the random strategy),
  3. attacker match outcome (skipped when no opponent is eligible),
  4. a permutation pairing the remaining players,
  5. one uniform per pool match,

and the environment stream serves one normal per player per round (skipped
entirely for the no-drift model).  This makes results bit-identical for a
fixed (config, seed) within this implementation; normal variates come from
numpy's documented ziggurat sampler, so other implementations can match
distributions but not bit streams.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import RatingSystem, adjustment, k_value
from .curves import eval_sigma, p_close

__all__ = [
    "RandomOpponent",
    "GreedyGain",
    "FixedOffset",
    "Strategy",
    "NoDrift",
    "GaussianWalk",
    "MeanReverting",
    "DriftModel",
    "UniformInit",
    "NormalInit",
    "Player",
    "ExperimentConfig",
    "ExperimentResult",
    "sample_outcome",
    "select_opponent",
    "step_drift",
    "run_experiment",
    "run_replicates",
    "strategic_advantage",
]


@dataclass(frozen=True)
class RandomOpponent:
    """Pick uniformly among eligible opponents."""


@dataclass(frozen=True)
class GreedyGain:
    """Pick the eligible opponent maximizing the expected gain, assuming the
    opponent is correctly rated and using the attacker's estimate of their
    own true rating.  A flat objective (spread below tie_tol) falls back to
    the lowest id."""

    tie_tol: float = 1e-9


@dataclass(frozen=True)
class FixedOffset:
    """Pick the eligible opponent whose current rating is nearest to the
    attacker's current rating plus a fixed offset."""

    offset: float


Strategy = RandomOpponent | GreedyGain | FixedOffset


@dataclass(frozen=True)
class NoDrift:
    pass


@dataclass(frozen=True)
class GaussianWalk:
    step: float

    def __post_init__(self):
        if self.step < 0:
            raise ValueError("step must be nonnegative")


@dataclass(frozen=True)
class MeanReverting:
    rate: float
    anchor: float
    step: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")
        if self.step < 0:
            raise ValueError("step must be nonnegative")


DriftModel = NoDrift | GaussianWalk | MeanReverting


@dataclass(frozen=True)
class UniformInit:
    lo: float
    hi: float


@dataclass(frozen=True)
class NormalInit:
    mean: float
    sd: float


@dataclass
class Player:
    id: int
    current: float
    true_rating: float
    strategy: Strategy = RandomOpponent()


@dataclass(frozen=True)
class ExperimentConfig:
    system: RatingSystem
    pool_size: int
    init: UniformInit | NormalInit
    rounds: int
    seed: int
    attacker_strategy: Strategy = RandomOpponent()
    drift: DriftModel = NoDrift()
    band: float | None = None
    attacker_start: float = 1500.0
    estimate_noise_sd: float = 0.0
    log_matches: bool = True

    def validate(self):
        if self.pool_size < 2:
            raise ValueError("pool size must be at least 2")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.band is not None and not 0.0 < self.band <= 0.5:
            raise ValueError("band must lie in (0, 0.5]")
        if self.estimate_noise_sd < 0:
            raise ValueError("estimate noise must be nonnegative")


@dataclass
class ExperimentResult:
    """Time series and logs of one seeded run.

    Attacker-facing arrays have one entry per round; ``winner`` is 1 when
    the attacker won, 0 when they lost, and -1 for a skipped round (no
    eligible opponent; opponent_id is -1 and the transfer 0 there).
    ``match_log`` rows are (round, first_id, second_id, winner_id, transfer)
    for every match played, present when the config asked for logging.
    """

    config: ExperimentConfig
    seed: int
    attacker_current: np.ndarray
    attacker_true: np.ndarray
    opponent_id: np.ndarray
    opponent_current: np.ndarray
    winner: np.ndarray
    transfer: np.ndarray
    pool_mean: np.ndarray
    pool_var: np.ndarray
    matches_played: np.ndarray
    initial_current: np.ndarray
    final_current: np.ndarray
    final_true: np.ndarray
    match_log: list[tuple] | None

    @property
    def rounds_skipped(self) -> int:
        return int(np.sum(self.winner == -1))

    @property
    def final_half_mean(self) -> float:
        half = self.attacker_current.size // 2
        return float(self.attacker_current[half:].mean())

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "rounds": int(self.attacker_current.size),
            "rounds_skipped": self.rounds_skipped,
            "attacker_final_half_mean": self.final_half_mean,
            "attacker_final_current": float(self.attacker_current[-1]),
            "attacker_final_true": float(self.attacker_true[-1]),
            "pool_mean_final": float(self.pool_mean[-1]),
        }


def sample_outcome(rng: np.random.Generator, sys: RatingSystem,
                   x_star: float, y_star: float) -> int:
    """1 if the first player wins, 0 otherwise; consumes exactly one
    uniform draw.  The win probability is sigma of the true ratings."""
    return int(rng.random() < eval_sigma(sys.curve, x_star, y_star))


def _choose(rng: np.random.Generator, strategy: Strategy, x_cur: float,
            x_est: float, candidate_currents: np.ndarray, sys: RatingSystem) -> int:
    """Index into the (id-ascending) candidate array, per strategy.
    First-occurrence argmax/argmin means exact ties go to the lowest id."""
    if isinstance(strategy, RandomOpponent):
        return int(rng.integers(candidate_currents.size))
    if isinstance(strategy, GreedyGain):
        gain = k_value(sys.k, x_cur, candidate_currents) * (
            eval_sigma(sys.curve, x_est, candidate_currents)
            - eval_sigma(sys.curve, x_cur, candidate_currents))
        if float(gain.max() - gain.min()) < strategy.tie_tol:
            return 0
        return int(np.argmax(gain))
    if isinstance(strategy, FixedOffset):
        return int(np.argmin(np.abs(candidate_currents - (x_cur + strategy.offset))))
    raise TypeError(f"unknown strategy: {type(strategy).__name__}")


def select_opponent(rng: np.random.Generator, player: Player, pool: list[Player],
                    sys: RatingSystem, band: float | None = None,
                    true_estimate: float | None = None) -> Player | None:
    """Pick the player's next opponent from the pool, or None when band
    filtering leaves nobody eligible (skip-round signal)."""
    others = sorted((q for q in pool if q.id != player.id), key=lambda q: q.id)
    if band is not None:
        others = [q for q in others
                  if p_close(sys.curve, player.current, q.current, band)]
    if not others:
        return None
    currents = np.array([q.current for q in others])
    est = player.true_rating if true_estimate is None else true_estimate
    return others[_choose(rng, player.strategy, player.current, est, currents, sys)]


def step_drift(rng: np.random.Generator, true_rating: float,
               model: DriftModel) -> float:
    """Advance one player's true rating by one round of drift."""
    if isinstance(model, NoDrift):
        return true_rating
    if isinstance(model, GaussianWalk):
        return true_rating + rng.normal(0.0, model.step)
    if isinstance(model, MeanReverting):
        return ((1.0 - model.rate) * true_rating + model.rate * model.anchor
                + rng.normal(0.0, model.step))
    raise TypeError(f"unknown drift model: {type(model).__name__}")


def _drift_all(rng: np.random.Generator, true: np.ndarray,
               model: DriftModel) -> np.ndarray:
    if isinstance(model, NoDrift):
        return true
    if isinstance(model, GaussianWalk):
        return true + rng.normal(0.0, model.step, true.size)
    if isinstance(model, MeanReverting):
        return ((1.0 - model.rate) * true + model.rate * model.anchor
                + rng.normal(0.0, model.step, true.size))
    raise TypeError(f"unknown drift model: {type(model).__name__}")


def _draw_initial(rng: np.random.Generator, init, count: int) -> np.ndarray:
    if isinstance(init, UniformInit):
        return rng.uniform(init.lo, init.hi, count)
    if isinstance(init, NormalInit):
        return rng.normal(init.mean, init.sd, count)
    raise TypeError(f"unknown initial distribution: {type(init).__name__}")


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run one seeded experiment; see the module docstring for the round
    structure and draw order.  Deterministic for a fixed config."""
    config.validate()
    sys = config.system
    env_seed, match_seed = np.random.SeedSequence(config.seed).spawn(2)
    env_rng = np.random.default_rng(env_seed)
    rng = np.random.default_rng(match_seed)
    n = config.pool_size
    rounds = config.rounds

    true = np.empty(n)
    true[0] = config.attacker_start
    true[1:] = _draw_initial(env_rng, config.init, n - 1)
    current = true.copy()  # everyone starts correctly rated
    initial_current = current.copy()

    att_cur = np.empty(rounds)
    att_true = np.empty(rounds)
    opp_ids = np.empty(rounds, dtype=np.int64)
    opp_cur = np.empty(rounds)
    winners = np.empty(rounds, dtype=np.int64)
    transfers = np.empty(rounds)
    pool_mean = np.empty(rounds)
    pool_var = np.empty(rounds)
    matches_played = np.zeros(n, dtype=np.int64)
    log: list[tuple] | None = [] if config.log_matches else None

    others_all = np.arange(1, n)
    for rnd in range(rounds):
        est = true[0]
        if config.estimate_noise_sd > 0:
            est = est + rng.normal(0.0, config.estimate_noise_sd)

        if config.band is not None:
            eligible = others_all[p_close(sys.curve, current[0],
                                          current[1:], config.band)]
        else:
            eligible = others_all
        if eligible.size == 0:
            opp = -1
            opp_ids[rnd] = -1
            opp_cur[rnd] = 0.0
            winners[rnd] = -1
            transfers[rnd] = 0.0
        else:
            opp = int(eligible[_choose(rng, config.attacker_strategy, current[0],
                                       est, current[eligible], sys)])
            opp_ids[rnd] = opp
            opp_cur[rnd] = current[opp]
            attacker_won = rng.random() < eval_sigma(sys.curve, true[0], true[opp])
            w, l = (0, opp) if attacker_won else (opp, 0)
            t = adjustment(sys, current[w], current[l])
            winners[rnd] = 1 if attacker_won else 0
            transfers[rnd] = t
            if log is not None:
                log.append((rnd, 0, opp, w, float(t)))
            current[w] += t
            current[l] -= t
            matches_played[0] += 1
            matches_played[opp] += 1

        # all non-attackers pair among themselves, including this round's
        # opponent, so nobody is starved of pool play by attacker attention
        perm = rng.permutation(others_all)
        n_pairs = perm.size // 2
        if n_pairs:
            pa = perm[: 2 * n_pairs : 2]
            pb = perm[1 : 2 * n_pairs : 2]
            first_wins = rng.random(n_pairs) < eval_sigma(sys.curve, true[pa], true[pb])
            w_idx = np.where(first_wins, pa, pb)
            l_idx = np.where(first_wins, pb, pa)
            t = adjustment(sys, current[w_idx], current[l_idx])
            if log is not None:
                log.extend(
                    (rnd, int(a), int(b), int(w), float(tv))
                    for a, b, w, tv in zip(pa, pb, w_idx, t))
            current[w_idx] += t
            current[l_idx] -= t
            matches_played[pa] += 1
            matches_played[pb] += 1

        true = _drift_all(env_rng, true, config.drift)
        att_cur[rnd] = current[0]
        att_true[rnd] = true[0]
        pool_mean[rnd] = current.mean()
        pool_var[rnd] = current.var()

    return ExperimentResult(
        config=config, seed=config.seed,
        attacker_current=att_cur, attacker_true=att_true,
        opponent_id=opp_ids, opponent_current=opp_cur,
        winner=winners, transfer=transfers,
        pool_mean=pool_mean, pool_var=pool_var,
        matches_played=matches_played,
        initial_current=initial_current,
        final_current=current.copy(), final_true=true.copy(),
        match_log=log,
    )


def run_replicates(config: ExperimentConfig, seeds, n_jobs: int = 1) -> list[ExperimentResult]:
    """Run the same experiment under each seed; replicates are independent
    and may run in parallel.  Results come back in seed order either way."""
    configs = [dataclasses.replace(config, seed=int(s)) for s in seeds]
    if n_jobs <= 1 or len(configs) <= 1:
        return [run_experiment(c) for c in configs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(run_experiment, configs))


def _comparable(config: ExperimentConfig) -> ExperimentConfig:
    return dataclasses.replace(config, seed=0, attacker_strategy=RandomOpponent())


def strategic_advantage(strategic: list[ExperimentResult],
                        baseline: list[ExperimentResult],
                        n_boot: int = 10_000, boot_seed: int = 20260811,
                        ) -> tuple[float, tuple[float, float]]:
    """Mean attacker advantage of the strategic arm over the baseline arm.

    The statistic per run is the attacker's mean current rating over the
    final half of the rounds.  Returns (delta of arm means, 95% bootstrap
    confidence interval) with a fixed bootstrap seed.  When the two arms ran
    the same seed set, runs are paired by seed and seeds are resampled
    (each seed shares its pool and drift trajectory across arms, so pairing
    cancels the random-walk common mode); otherwise the arms are resampled
    independently.  Arms must share their config apart from the attacker
    strategy and the seed set.
    """
    if not strategic or not baseline:
        raise ValueError("both arms need at least one result")
    reference = _comparable(strategic[0].config)
    for r in list(strategic) + list(baseline):
        if _comparable(r.config) != reference:
            raise ValueError("mismatched experiment configs between arms")
    s_seeds = [r.seed for r in strategic]
    b_seeds = [r.seed for r in baseline]
    rng = np.random.default_rng(boot_seed)
    if sorted(s_seeds) == sorted(b_seeds) and len(set(s_seeds)) == len(s_seeds):
        s = np.array([r.final_half_mean for r in sorted(strategic, key=lambda r: r.seed)])
        b = np.array([r.final_half_mean for r in sorted(baseline, key=lambda r: r.seed)])
        diffs = s - b
        delta = float(diffs.mean())
        resampled = diffs[rng.integers(0, diffs.size, size=(n_boot, diffs.size))].mean(axis=1)
    else:
        s = np.array([r.final_half_mean for r in strategic])
        b = np.array([r.final_half_mean for r in baseline])
        delta = float(s.mean() - b.mean())
        s_means = s[rng.integers(0, s.size, size=(n_boot, s.size))].mean(axis=1)
        b_means = b[rng.integers(0, b.size, size=(n_boot, b.size))].mean(axis=1)
        resampled = s_means - b_means
    lo, hi = np.percentile(resampled, [2.5, 97.5])
    return delta, (float(lo), float(hi))
