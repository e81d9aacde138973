#!/usr/bin/env python3
"""Regenerate the attack-differential regression baseline.

Runs the two-arm experiment (greedy vs random attacker) on the unclamped
Elo system without matchmaking restrictions and on the Sonas system with
band-restricted matchmaking, 20 seeds each, and writes the observed deltas,
confidence intervals and acceptance thresholds to
tests/data/attack_pilot_baseline.json.
"""

import dataclasses
import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from ratinglab import (  # noqa: E402
    ExperimentConfig, GaussianWalk, GreedyGain, NormalInit, RandomOpponent,
    builtin_systems, run_replicates, strategic_advantage,
)

SEEDS = tuple(range(20))
ROUNDS = 10_000
POOL = 16


def run_pair(system, band, jobs):
    base = ExperimentConfig(system=system, pool_size=POOL,
                            init=NormalInit(1500.0, 300.0), rounds=ROUNDS, seed=0,
                            attacker_strategy=GreedyGain(), drift=GaussianWalk(20.0),
                            band=band, log_matches=False)
    strategic = run_replicates(base, SEEDS, n_jobs=jobs)
    baseline = run_replicates(dataclasses.replace(base, attacker_strategy=RandomOpponent()),
                              SEEDS, n_jobs=jobs)
    return strategic_advantage(strategic, baseline)


def main():
    jobs = int(os.environ.get("RATINGLAB_JOBS", "4"))
    systems = builtin_systems()
    elo_delta, elo_ci = run_pair(systems["logistic_const"], band=None, jobs=jobs)
    son_delta, son_ci = run_pair(systems["sonas_const"], band=0.4, jobs=jobs)
    doc = {
        "numpy_version": np.__version__,
        "seeds": list(SEEDS),
        "rounds": ROUNDS,
        "pool_size": POOL,
        "drift_step": 20.0,
        "band": 0.4,
        "elo": {"delta": elo_delta, "ci95": list(elo_ci)},
        "sonas_banded": {"delta": son_delta, "ci95": list(son_ci)},
        # acceptance thresholds derived from the pilot: the elo attack must
        # keep a clearly positive edge, the banded sonas attack must stay
        # near zero
        "thresholds": {"elo_delta_min": 150.0, "sonas_abs_delta_max": 60.0},
    }
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                       "attack_pilot_baseline.json")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"elo: delta={elo_delta:+.3f} CI={elo_ci}")
    print(f"sonas banded: delta={son_delta:+.3f} CI={son_ci}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
