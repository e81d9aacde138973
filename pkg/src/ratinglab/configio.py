"""Serialization: JSON config documents for curves, K-functions, systems and
experiments, plus the CSV formats the CLI emits and consumes.

Floats in CSV files are written with 17 significant digits so that parsing
them back reproduces the in-memory doubles exactly.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from . import sim
from .core import ConstantK, KFunction, RatingSumK, RatingSystem, TabulatedK
from .curves import (
    BisectorTable,
    Separable,
    SkillCurve,
    SonasLike,
    Tabulated,
    ThresholdedLogistic,
    Trivial,
)
from .verifier import PropertyReport

__all__ = [
    "curve_to_dict", "curve_from_dict",
    "k_to_dict", "k_from_dict",
    "system_to_dict", "system_from_dict", "load_system", "save_system",
    "SimulationPlan", "simulation_plan_from_dict", "load_simulation_plan",
    "load_tabulated_csv",
    "write_csv", "read_csv_columns",
    "write_attacker_csv", "write_chain_csv", "write_gain_csv",
    "write_report", "write_json",
]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


# ---------------------------------------------------------------- curves

def curve_to_dict(curve: SkillCurve) -> dict:
    if isinstance(curve, Trivial):
        return {"variant": "trivial"}
    if isinstance(curve, SonasLike):
        return {"variant": "sonas", "a": curve.slope, "s": curve.threshold}
    if isinstance(curve, ThresholdedLogistic):
        clamp = None if curve.clamp == float("inf") else curve.clamp
        return {"variant": "logistic", "scale": curve.scale, "clamp": clamp}
    if isinstance(curve, Separable):
        b = curve.bisector
        return {"variant": "separable",
                "bisector": {"xs": b.xs.tolist(), "values": b.values.tolist(),
                             "reference": b.reference}}
    if isinstance(curve, Tabulated):
        return {"variant": "tabulated", "x": curve.xs.tolist(), "y": curve.ys.tolist(),
                "sigma": curve.values.tolist(), "interpolate": curve.interpolate}
    raise TypeError(f"unknown curve variant: {type(curve).__name__}")


def curve_from_dict(doc: dict, base_dir: str = ".") -> SkillCurve:
    variant = doc.get("variant")
    if variant == "trivial":
        return Trivial()
    if variant == "sonas":
        return SonasLike(slope=float(doc["a"]), threshold=float(doc["s"]))
    if variant == "logistic":
        clamp = doc.get("clamp")
        return ThresholdedLogistic(scale=float(doc["scale"]),
                                   clamp=float("inf") if clamp is None else float(clamp))
    if variant == "separable":
        b = doc["bisector"]
        return Separable(BisectorTable(np.asarray(b["xs"], dtype=float),
                                       np.asarray(b["values"], dtype=float),
                                       reference=float(b["reference"])))
    if variant == "tabulated":
        interpolate = bool(doc.get("interpolate", True))
        if "csv" in doc:
            x_col, y_col, s_col = load_tabulated_csv(os.path.join(base_dir, doc["csv"]))
            return Tabulated.from_points(x_col, y_col, s_col,
                                         symmetrize=bool(doc.get("symmetrize", True)),
                                         interpolate=interpolate)
        return Tabulated(np.asarray(doc["x"], dtype=float),
                         np.asarray(doc["y"], dtype=float),
                         np.asarray(doc["sigma"], dtype=float),
                         interpolate=interpolate)
    raise ValueError(f"unknown curve variant in config: {variant!r}")


def load_tabulated_csv(path: str):
    """Read a sigma grid from a CSV with header x,y,sigma."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["x", "y", "sigma"]:
            raise ValueError(f"{path}: expected header x,y,sigma")
        rows = [(float(r["x"]), float(r["y"]), float(r["sigma"])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    xs, ys, ss = zip(*rows)
    return np.array(xs), np.array(ys), np.array(ss)


# ---------------------------------------------------------------- K-functions

def k_to_dict(k: KFunction) -> dict:
    if isinstance(k, ConstantK):
        return {"variant": "constant", "c": k.value}
    if isinstance(k, RatingSumK):
        return {"variant": "rating_sum", "base": k.base, "slope": k.slope}
    if isinstance(k, TabulatedK):
        return {"variant": "tabulated", "x": k.xs.tolist(), "k": k.values.tolist()}
    raise TypeError(f"unknown K variant: {type(k).__name__}")


def k_from_dict(doc: dict) -> KFunction:
    variant = doc.get("variant")
    if variant == "constant":
        return ConstantK(float(doc["c"]))
    if variant == "rating_sum":
        return RatingSumK(base=float(doc["base"]), slope=float(doc["slope"]))
    if variant == "tabulated":
        return TabulatedK(np.asarray(doc["x"], dtype=float),
                          np.asarray(doc["k"], dtype=float))
    raise ValueError(f"unknown K variant in config: {variant!r}")


# ---------------------------------------------------------------- systems

def system_to_dict(system: RatingSystem) -> dict:
    return {"curve": curve_to_dict(system.curve), "k": k_to_dict(system.k)}


def system_from_dict(doc: dict, base_dir: str = ".") -> RatingSystem:
    # a bare curve descriptor is accepted as a system with the default K
    if "curve" not in doc:
        if "variant" in doc:
            return RatingSystem(curve=curve_from_dict(doc, base_dir=base_dir),
                                k=ConstantK(32.0))
        raise ValueError("system config needs a 'curve' entry")
    curve = curve_from_dict(doc["curve"], base_dir=base_dir)
    k = k_from_dict(doc["k"]) if "k" in doc else ConstantK(32.0)
    return RatingSystem(curve=curve, k=k)


def load_system(path: str) -> RatingSystem:
    with open(path) as fh:
        doc = json.load(fh)
    return system_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def save_system(system: RatingSystem, path: str):
    write_json(system_to_dict(system), path)


# ---------------------------------------------------------------- experiments

def _strategy_from_dict(doc: dict) -> sim.Strategy:
    kind = doc.get("kind")
    if kind == "random":
        return sim.RandomOpponent()
    if kind == "greedy":
        return sim.GreedyGain(tie_tol=float(doc.get("tie_tol", 1e-9)))
    if kind == "fixed_offset":
        return sim.FixedOffset(offset=float(doc["offset"]))
    raise ValueError(f"unknown strategy kind: {kind!r}")


def _strategy_to_dict(strategy: sim.Strategy) -> dict:
    if isinstance(strategy, sim.RandomOpponent):
        return {"kind": "random"}
    if isinstance(strategy, sim.GreedyGain):
        return {"kind": "greedy", "tie_tol": strategy.tie_tol}
    if isinstance(strategy, sim.FixedOffset):
        return {"kind": "fixed_offset", "offset": strategy.offset}
    raise TypeError(f"unknown strategy: {type(strategy).__name__}")


def _drift_from_dict(doc: dict) -> sim.DriftModel:
    kind = doc.get("kind", "none")
    if kind == "none":
        return sim.NoDrift()
    if kind == "gaussian_walk":
        return sim.GaussianWalk(step=float(doc["step"]))
    if kind == "mean_reverting":
        return sim.MeanReverting(rate=float(doc["rate"]), anchor=float(doc["anchor"]),
                                 step=float(doc["step"]))
    raise ValueError(f"unknown drift kind: {kind!r}")


def _init_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "uniform":
        return sim.UniformInit(lo=float(doc["lo"]), hi=float(doc["hi"]))
    if kind == "normal":
        return sim.NormalInit(mean=float(doc["mean"]), sd=float(doc["sd"]))
    raise ValueError(f"unknown initial distribution kind: {kind!r}")


@dataclass(frozen=True)
class SimulationPlan:
    """A two-arm experiment: the configured attacker strategy versus a
    baseline strategy, each run once per seed."""

    config: sim.ExperimentConfig
    seeds: tuple[int, ...]
    baseline_strategy: sim.Strategy


def simulation_plan_from_dict(doc: dict, base_dir: str = ".") -> SimulationPlan:
    system = system_from_dict(doc["system"], base_dir=base_dir)
    seeds = tuple(int(s) for s in doc.get("seeds", [0]))
    if not seeds:
        raise ValueError("experiment config needs at least one seed")
    band = doc.get("band")
    config = sim.ExperimentConfig(
        system=system,
        pool_size=int(doc["pool_size"]),
        init=_init_from_dict(doc["init"]),
        rounds=int(doc["rounds"]),
        seed=seeds[0],
        attacker_strategy=_strategy_from_dict(doc.get("attacker_strategy",
                                                      {"kind": "greedy"})),
        drift=_drift_from_dict(doc.get("drift", {"kind": "none"})),
        band=None if band is None else float(band),
        attacker_start=float(doc.get("attacker_start", 1500.0)),
        estimate_noise_sd=float(doc.get("estimate_noise_sd", 0.0)),
        log_matches=bool(doc.get("log_matches", False)),
    )
    config.validate()
    baseline = _strategy_from_dict(doc.get("baseline_strategy", {"kind": "random"}))
    return SimulationPlan(config=config, seeds=seeds, baseline_strategy=baseline)


def load_simulation_plan(path: str) -> SimulationPlan:
    with open(path) as fh:
        doc = json.load(fh)
    return simulation_plan_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------- CSV / JSON

def write_csv(path: str, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv_columns(path: str, expected_header: list[str] | None = None) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        if expected_header is not None and header != expected_header:
            raise ValueError(f"{path}: expected header {','.join(expected_header)}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array(rows)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return {name: data[:, i] for i, name in enumerate(header)}


ATTACKER_CSV_HEADER = ["round", "attacker_current", "attacker_true", "opponent_id",
                       "opponent_current", "winner", "transfer"]


def write_attacker_csv(result: sim.ExperimentResult, path: str):
    rows = zip(range(result.attacker_current.size), result.attacker_current,
               result.attacker_true, result.opponent_id, result.opponent_current,
               result.winner, result.transfer)
    write_csv(path, ATTACKER_CSV_HEADER, rows)


def write_chain_csv(chain, path: str):
    achieved = [0.5] + list(chain.achieved)  # sigma(r1, r1) = 0.5 anchors row 1
    rows = [(n + 1, r, achieved[n], chain.predicted_span[n])
            for n, r in enumerate(chain.ratings)]
    write_csv(path, ["index", "rating", "achieved_sigma", "predicted_sigma"], rows)


def write_gain_csv(ys, gammas, path: str):
    write_csv(path, ["y", "gamma"], zip(ys, gammas))


def write_json(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report(report: PropertyReport, path: str):
    write_json(report.to_dict(), path)
