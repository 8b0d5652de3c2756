"""Exact small-instance analysis of the chamber walk.

Transition matrix, stationary distribution (linear solve plus the
sampling-without-replacement construction as an independent oracle),
separation and total-variation distance, the inclusion-exclusion formula
for P(T > t), and the coupling parameters b, d with the cutoff prediction
they determine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CapacityError, check_separating, face_product, is_chamber
from .walk import trial_rng

DEFAULT_CHAMBER_CAP = 10_000
DEFAULT_IE_HYPERPLANE_CAP = 20
ENUM_ORDERING_FACE_CAP = 9


def transition_matrix(arr, w, chamber_cap=DEFAULT_CHAMBER_CAP):
    """Row-stochastic matrix P[C, D] = sum of w(F) over faces with FC = D."""
    ell = arr.n_chambers
    if ell > chamber_cap:
        raise CapacityError(f"{ell} chambers exceeds exact-mode cap {chamber_cap}")
    P = np.zeros((ell, ell))
    for f, wt in zip(w.faces, w.weights):
        for ci, c in enumerate(arr.chambers):
            d = face_product(f, c)
            P[ci, arr.chamber_index(d)] += wt
    return P


def stationary_solve(arr, w, chamber_cap=DEFAULT_CHAMBER_CAP):
    """Stationary probability vector: solves pi P = pi, sum(pi) = 1."""
    if not check_separating(arr, w):
        raise ValueError("non-separating weights: stationary law not unique")
    P = transition_matrix(arr, w, chamber_cap)
    ell = P.shape[0]
    A = np.vstack([P.T - np.eye(ell), np.ones((1, ell))])
    b = np.zeros(ell + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = np.abs(pi @ P - pi).max()
    if residual > 1e-10:
        raise RuntimeError(f"stationary solve residual {residual:.3g} > 1e-10")
    return pi


def stationary_without_replacement(
    arr, w, max_enum_faces=ENUM_ORDERING_FACE_CAP, trials=200_000, seed=0
):
    """Stationary law via a sampling-without-replacement construction.

    Sample faces without replacement from w and apply them in reverse order,
    so the chamber is F1 F2 ... (first-sampled face leftmost).  Exact
    enumeration over orderings when the number of weighted faces allows,
    Monte Carlo otherwise (returns (pi_hat, std_err) in that case).

    The prefix product is extended left-to-right and the recursion stops as
    soon as it is a chamber: later faces cannot change it.
    """
    n_faces = len(w.faces)
    pi = np.zeros(arr.n_chambers)
    if n_faces <= max_enum_faces:
        weights = w.weights

        def recurse(prefix, remaining, prob):
            if prefix is not None and is_chamber(prefix):
                pi[arr.chamber_index(prefix)] += prob
                return
            total = weights[remaining].sum()
            for k in remaining:
                nxt = (
                    w.faces[k]
                    if prefix is None
                    else face_product(prefix, w.faces[k])
                )
                recurse(nxt, [j for j in remaining if j != k], prob * weights[k] / total)

        recurse(None, list(range(n_faces)), 1.0)
        return pi
    # Monte Carlo fallback
    for k in range(trials):
        rng = trial_rng(seed, k)
        remaining = list(range(n_faces))
        prefix = None
        while prefix is None or not is_chamber(prefix):
            probs = w.weights[remaining]
            j = remaining[rng.choice(len(remaining), p=probs / probs.sum())]
            prefix = w.faces[j] if prefix is None else face_product(prefix, w.faces[j])
            remaining.remove(j)
        pi[arr.chamber_index(prefix)] += 1.0
    pi /= trials
    std_err = np.sqrt(pi * (1 - pi) / trials)
    return pi, std_err


def _power_profile(P, t_grid):
    """Yield (t, P^t) along an increasing integer grid."""
    t_grid = sorted(set(int(t) for t in t_grid))
    Pt = np.eye(P.shape[0])
    current = 0
    for t in t_grid:
        for _ in range(t - current):
            Pt = Pt @ P
        current = t
        yield t, Pt


def separation_profile(arr, w, t_grid, chamber_cap=DEFAULT_CHAMBER_CAP):
    """Exact separation distance s(t) over an integer time grid.

    s(t) = max over starts x0 of 1 - min over x of P^t(x0, x) / pi(x).
    """
    P = transition_matrix(arr, w, chamber_cap)
    pi = stationary_solve(arr, w, chamber_cap)
    out = {}
    for t, Pt in _power_profile(P, t_grid):
        ratios = Pt / pi[np.newaxis, :]
        out[t] = float((1.0 - ratios.min(axis=1)).max())
    return out


def separation_distance(arr, w, t, chamber_cap=DEFAULT_CHAMBER_CAP):
    return separation_profile(arr, w, [t], chamber_cap)[int(t)]


def total_variation_profile(arr, w, t_grid, chamber_cap=DEFAULT_CHAMBER_CAP):
    """Exact worst-case total variation distance to stationarity on a grid."""
    P = transition_matrix(arr, w, chamber_cap)
    pi = stationary_solve(arr, w, chamber_cap)
    out = {}
    for t, Pt in _power_profile(P, t_grid):
        out[t] = float(0.5 * np.abs(Pt - pi[np.newaxis, :]).sum(axis=1).max())
    return out


def total_variation(arr, w, t, chamber_cap=DEFAULT_CHAMBER_CAP):
    return total_variation_profile(arr, w, [t], chamber_cap)[int(t)]


def survival_terms(arr, w, hyperplane_cap=DEFAULT_IE_HYPERPLANE_CAP):
    """Inclusion-exclusion terms for P(T > t).

    T > t iff some hyperplane is uncut, i.e. every face picked so far lies
    on it.  With q_S = total weight of faces lying on every hyperplane in S,
    P(T > t) = sum over nonempty S of (-1)^(|S|+1) q_S^t.  Returns a list of
    (sign, q_S) pairs; subsets with q_S = 0 are pruned together with all
    their supersets (q is monotone decreasing in S).
    """
    m = arr.m
    if m > hyperplane_cap:
        raise CapacityError(
            f"m={m} exceeds inclusion-exclusion cap {hyperplane_cap}; "
            "use Monte Carlo survival estimation"
        )
    face_data = list(zip(w.zero_masks(), w.weights))
    terms = []

    def extend(start, size, compatible):
        for i in range(start, m):
            bit = 1 << i
            sub = [(mask, wt) for mask, wt in compatible if mask & bit]
            if not sub:
                continue
            q = sum(wt for _, wt in sub)
            terms.append((1 if (size + 1) % 2 == 1 else -1, q))
            extend(i + 1, size + 1, sub)

    extend(0, 0, face_data)
    return terms


def survival_exact(arr, w, t, hyperplane_cap=DEFAULT_IE_HYPERPLANE_CAP):
    """Exact P(T > t) by inclusion-exclusion over uncut hyperplanes."""
    return survival_exact_profile(arr, w, [t], hyperplane_cap)[int(t)]


def survival_exact_profile(arr, w, t_grid, hyperplane_cap=DEFAULT_IE_HYPERPLANE_CAP):
    terms = survival_terms(arr, w, hyperplane_cap)
    signs = np.array([s for s, _ in terms], dtype=float)
    qs = np.array([q for _, q in terms])
    out = {}
    for t in t_grid:
        t = int(t)
        out[t] = float(np.clip((signs * qs**t).sum(), 0.0, 1.0)) if t > 0 else 1.0
    return out


@dataclass(frozen=True)
class CouplingParameters:
    """b_i = weight not on H_i; d_ij = weight on neither H_i nor H_j."""

    b_per_hyperplane: np.ndarray
    d_per_pair: np.ndarray
    uniform_b: float | None
    uniform_d: float | None


def coupling_parameters(arr, w):
    """Exact b_i and d_ij from the explicit weighted faces.

    The uniform values are set only when all entries agree within 1e-12,
    which is the regime where the cutoff prediction applies.
    """
    m = arr.m
    masks = w.zero_masks()
    b = np.zeros(m)
    d = np.zeros((m, m))
    for mask, wt in zip(masks, w.weights):
        for i in range(m):
            if not (mask >> i) & 1:
                b[i] += wt
        for i in range(m):
            if (mask >> i) & 1:
                continue
            for j in range(m):
                if not (mask >> j) & 1 and j != i:
                    d[i, j] += wt
    off = d[~np.eye(m, dtype=bool)] if m > 1 else np.array([])
    uniform_b = float(b[0]) if np.ptp(b) <= 1e-12 else None
    uniform_d = None
    if m > 1 and np.ptp(off) <= 1e-12:
        uniform_d = float(off[0])
    return CouplingParameters(b, d, uniform_b, uniform_d)


@dataclass(frozen=True)
class CutoffPrediction:
    time: float
    window: float
    assumptions_ok: bool


def cutoff_prediction(b, d, m):
    """Predicted separation cutoff location and window.

    Cutoff at log base 1/(1-b) of m, window 1/b, valid when b <= (1+d)/2
    and 0 < d <= b^2.
    """
    if not 0 < b < 1:
        raise ValueError("need 0 < b < 1")
    time = math.log(m) / math.log(1.0 / (1.0 - b))
    window = 1.0 / b
    assumptions_ok = (b <= (1.0 + d) / 2.0) and (0.0 < d <= b * b + 1e-15)
    return CutoffPrediction(time=time, window=window, assumptions_ok=assumptions_ok)
