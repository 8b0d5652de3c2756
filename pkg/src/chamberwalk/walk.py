"""Monte Carlo engine for the chamber walk and its stopping time T.

T is the first step at which the product of the faces picked so far is a
chamber.  Because the product's zero set is the intersection of the picked
faces' zero sets, T only depends on which hyperplanes have been "cut" so
far, so the sampler tracks the shrinking set of uncut hyperplanes instead
of the full face product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import check_separating, face_product, is_chamber

DEFAULT_STEP_CAP = 10**9


def trial_rng(seed, trial):
    """Deterministic per-trial generator: stream ``trial`` of root ``seed``.

    Trials are reproducible and independent regardless of how they are
    scheduled across workers.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _require_separating(arr, w):
    if not check_separating(arr, w):
        raise ValueError("weights do not separate the hyperplanes; T may be infinite")


def simulate_chamber_at(arr, w, x0, t, seed):
    """State of the walk started at chamber x0 after t steps, C^t = F^t...F^1 x0."""
    _require_separating(arr, w)
    x0 = tuple(x0)
    if not is_chamber(x0):
        raise ValueError("starting state must be a chamber")
    rng = np.random.default_rng(seed)
    current = x0
    picks = rng.choice(len(w.faces), size=t, p=w.weights)
    for k in picks:
        current = face_product(w.faces[k], current)
    return current


def sample_T(arr, w, seed=None, rng=None, step_cap=DEFAULT_STEP_CAP):
    """Draw one copy of T by i.i.d. face picks from w.

    Each pick removes its support from the set of uncut hyperplanes; T is
    the first step at which that set empties.
    """
    _require_separating(arr, w)
    if rng is None:
        rng = np.random.default_rng(seed)
    supports = w.supports()
    uncut = set(range(arr.m))
    t = 0
    while uncut:
        t += 1
        if t > step_cap:
            raise RuntimeError(
                f"T exceeded the {step_cap}-step cap; check the weight measure"
            )
        k = rng.choice(len(supports), p=w.weights)
        uncut.difference_update(supports[k])
    return t


def sample_T_batch(arr, w, trials, seed, step_cap=DEFAULT_STEP_CAP):
    """Array of T samples; trial k uses the (seed, k) stream."""
    _require_separating(arr, w)
    supports = w.supports()
    n_faces = len(supports)
    out = np.empty(trials, dtype=np.int64)
    for k in range(trials):
        rng = trial_rng(seed, k)
        uncut = set(range(arr.m))
        t = 0
        # draw picks in blocks to amortize generator overhead
        while uncut:
            picks = rng.choice(n_faces, size=64, p=w.weights)
            for p in picks:
                t += 1
                uncut.difference_update(supports[p])
                if not uncut:
                    break
                if t > step_cap:
                    raise RuntimeError(f"T exceeded the {step_cap}-step cap")
        out[k] = t
    return out


@dataclass(frozen=True)
class SurvivalEstimate:
    """Monte Carlo estimate of the survival curve P(T > t)."""

    t_values: np.ndarray
    p_hat: np.ndarray
    std_err: np.ndarray
    trials: int
    seed: int


def survival_from_samples(samples, t_grid, seed=0):
    """Turn T samples into a SurvivalEstimate over a time grid."""
    t_grid = np.asarray(list(t_grid), dtype=np.int64)
    if t_grid.size == 0:
        raise ValueError("empty time grid")
    samples = np.asarray(samples)
    trials = len(samples)
    p_hat = np.array([(samples > t).mean() for t in t_grid])
    std_err = np.sqrt(p_hat * (1.0 - p_hat) / trials)
    return SurvivalEstimate(
        t_values=t_grid, p_hat=p_hat, std_err=std_err, trials=trials, seed=seed
    )


def estimate_survival(arr, w, t_grid, trials, seed, t_sampler=None):
    """Estimate P(T > t) over a grid from one T sample per trial.

    ``t_sampler(trials, seed) -> array`` replaces the generic per-trial
    sampler for families with a faster vectorized one; results stay
    deterministic in (seed, trials).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if t_sampler is not None:
        samples = t_sampler(trials, seed)
    else:
        samples = sample_T_batch(arr, w, trials, seed)
    return survival_from_samples(samples, t_grid, seed=seed)
