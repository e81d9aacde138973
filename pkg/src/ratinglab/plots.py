"""Figure rendering for the CLI report path.

Every plotting function takes plain arrays and saves a single figure to the
given path; matplotlib picks the format from the extension (the CLI always
asks for .svg).  Runs headless via the Agg backend.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import SkillCurve, eval_sigma

__all__ = ["sample_curve", "plot_curve", "plot_trajectory", "plot_gain"]


def sample_curve(curve: SkillCurve, anchor: float = 0.0, span: float = 800.0,
                 samples: int = 401):
    """(rating difference, sigma) samples of the curve around an anchor."""
    diffs = np.linspace(-span, span, samples)
    return diffs, np.asarray(eval_sigma(curve, anchor + diffs, anchor))


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_curve(diffs, sigmas, path: str, title: str = "skill curve") -> str:
    fig, ax = _new_axes("rating difference", "win probability")
    ax.plot(diffs, sigmas, lw=1.5)
    ax.axhline(0.5, color="gray", lw=0.8, ls="--")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    return _save(fig, path)


def plot_trajectory(rounds, attacker_current, attacker_true, path: str) -> str:
    fig, ax = _new_axes("round", "rating")
    ax.plot(rounds, attacker_current, lw=1.0, label="current")
    ax.plot(rounds, attacker_true, lw=1.0, alpha=0.7, label="true")
    ax.legend()
    ax.set_title("attacker rating trajectory")
    return _save(fig, path)


def plot_gain(ys, gammas, path: str, title: str = "expected gain vs opponent rating") -> str:
    fig, ax = _new_axes("opponent rating", "expected gain")
    ax.plot(ys, gammas, lw=1.5)
    ax.axhline(0.0, color="gray", lw=0.8, ls="--")
    ax.set_title(title)
    return _save(fig, path)
