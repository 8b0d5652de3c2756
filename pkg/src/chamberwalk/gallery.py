"""Weighted-face families on the braid and Boolean arrangements, plus the
move-to-front (Tsetlin library) machinery: the t* solver, the closed-form
separation bounds, the exact survival formula for "all but one card
touched", and vectorized samplers for large instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CapacityError,
    MINUS,
    PLUS,
    ZERO,
    partition_to_sign_vector,
    weighted_faces,
)

DEFAULT_ENUM_CAP = 1_000_000
DEFAULT_TSETLIN_EXACT_CAP = 20


def _check_weights(weights):
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise ValueError("card weights must be strictly positive")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"card weights sum to {w.sum()!r}, expected 1")
    return w


@dataclass(frozen=True)
class TsetlinSpec:
    """Move-to-front chain: pick card i with probability w_i, move it to top."""

    card_weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "card_weights", _check_weights(self.card_weights))
        if len(self.card_weights) < 1:
            raise ValueError("need at least one card")

    @property
    def n(self):
        return len(self.card_weights)


def tsetlin_faces(spec):
    """Faces {j}{rest} with weight w_j on the braid arrangement."""
    n = spec.n
    if n < 2:
        raise ValueError("tsetlin faces need n >= 2")
    rest_all = set(range(n))
    pairs = []
    for j, wt in enumerate(spec.card_weights):
        blocks = [{j}, rest_all - {j}]
        pairs.append((partition_to_sign_vector(blocks, n), wt))
    return weighted_faces(pairs)


def riffle_faces(n, a, enum_cap=DEFAULT_ENUM_CAP):
    """Inverse a-shuffle faces: mark each card with a value in {0..a-1}
    uniformly; the face is the ordered partition by increasing mark with
    empty marks collapsed.  Weight = (#mark functions inducing it) / a^n."""
    if a < 2:
        raise ValueError("need a >= 2")
    if a**n > enum_cap:
        raise CapacityError(
            f"a^n = {a**n} mark functions exceeds cap {enum_cap}; "
            "use riffle_mark_sampler for implicit sampling"
        )
    total = a**n
    pairs = []
    for marks in itertools.product(range(a), repeat=n):
        blocks = [
            {c for c, mk in enumerate(marks) if mk == v}
            for v in range(a)
            if any(mk == v for mk in marks)
        ]
        pairs.append((partition_to_sign_vector(blocks, n), 1.0 / total))
    return weighted_faces(pairs)


def riffle_mark_sampler(n, a, rng):
    """Draw one riffle face as an ordered partition of blocks, by marks."""
    marks = rng.integers(0, a, size=n)
    return [
        {c for c in range(n) if marks[c] == v}
        for v in range(a)
        if np.any(marks == v)
    ]


def riffle_coupling_closed_form(a):
    """b and d for the inverse a-shuffle (any n): the probability two given
    cards get different marks, resp. pairwise for two card pairs."""
    b = 1.0 - 1.0 / a
    d = (1.0 - 1.0 / a) ** 2
    return b, d


def k_to_top_faces(n, k):
    """Uniform weight on faces {S}{rest} with |S| = k."""
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    total = math.comb(n, k)
    pairs = []
    for S in itertools.combinations(range(n), k):
        blocks = [set(S), set(range(n)) - set(S)]
        pairs.append((partition_to_sign_vector(blocks, n), 1.0 / total))
    return weighted_faces(pairs)


def kset_coupling_closed_form(n, k):
    """b = k/n and d = k^2/n^2 - k(n-k)/(n^2 (n-1)); shared by k-to-top on
    the braid arrangement and the non-local hypercube walk."""
    b = k / n
    d = k**2 / n**2 - k * (n - k) / (n**2 * (n - 1))
    return b, d


def top_bottom_faces(n, card_weights=None):
    """Move a random card to top or bottom, each side with probability 1/2.

    Faces {c}{rest} and {rest}{c}, each with weight w_c / 2 (uniform case:
    1/(2n) each)."""
    if card_weights is None:
        card_weights = np.full(n, 1.0 / n)
    w = _check_weights(card_weights)
    if len(w) != n:
        raise ValueError("need one weight per card")
    rest_all = set(range(n))
    pairs = []
    for c, wt in enumerate(w):
        top = [{c}, rest_all - {c}]
        bottom = [rest_all - {c}, {c}]
        pairs.append((partition_to_sign_vector(top, n), wt / 2.0))
        pairs.append((partition_to_sign_vector(bottom, n), wt / 2.0))
    return weighted_faces(pairs)


def hypercube_nn_faces(w_plus, w_minus):
    """Weighted nearest-neighbor hypercube walk: faces e_i^+/- with a single
    nonzero coordinate."""
    wp = np.asarray(w_plus, dtype=float)
    wm = np.asarray(w_minus, dtype=float)
    if len(wp) != len(wm):
        raise ValueError("w_plus and w_minus length mismatch")
    if np.any(wp <= 0) or np.any(wm <= 0):
        raise ValueError("face weights must be strictly positive")
    if abs(wp.sum() + wm.sum() - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")
    n = len(wp)
    pairs = []
    for i in range(n):
        e_plus = tuple(PLUS if j == i else ZERO for j in range(n))
        e_minus = tuple(MINUS if j == i else ZERO for j in range(n))
        pairs.append((e_plus, wp[i]))
        pairs.append((e_minus, wm[i]))
    return weighted_faces(pairs)


def hypercube_nonlocal_faces(n, k, enum_cap=DEFAULT_ENUM_CAP):
    """Non-local hypercube walk: pick k coordinates at random and flip a fair
    coin for each.  Faces have any k-set support with signs in {+,-}^k."""
    if not 1 < k <= n / 2:
        raise ValueError("need 1 < k <= n/2")
    count = math.comb(n, k) * 2**k
    if count > enum_cap:
        raise CapacityError(
            f"{count} faces exceeds cap {enum_cap}; use sample_kset_coupon_T"
        )
    pairs = []
    for S in itertools.combinations(range(n), k):
        for signs in itertools.product((PLUS, MINUS), repeat=k):
            f = [ZERO] * n
            for idx, s in zip(S, signs):
                f[idx] = s
            pairs.append((tuple(f), 1.0 / count))
    return weighted_faces(pairs)


def solve_t_star(spec, tol=1e-9):
    """Unique t with sum_i exp(-w_i t) = 1/2, by bisection.

    The map is strictly decreasing from n >= 1/2 at t = 0, so a doubling
    search brackets the root.
    """
    w = spec.card_weights

    def g(t):
        return np.exp(-w * t).sum() - 0.5

    lo, hi = 0.0, 1.0
    while g(hi) > 0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class TsetlinBoundReport:
    """Evaluated separation bounds around t* for the move-to-front chain."""

    t_star: float
    c: float
    upper_time: float
    upper_value: float
    lower_time: float
    lower_value: float
    upper_clamped: bool
    lower_clamped: bool
    t_star_min_w: float
    t_star_min_w_sq: float


def tsetlin_bounds(spec, c, strict=True):
    """Closed-form separation bounds at t* +- multiples of 1/min(w).

    Upper: at t = t* + c/min(w),
        s(t) <= 1 - exp(-exp(-c/2)/2) + (4 min(w^2) t* + 2 c min(w)) / c^2.
    Lower: at t = t* - 2c/min(w),
        s(t) >= 1 - exp(-exp(c/2)/2) - (4 min(w^2) t* - 2 c min(w)) / c^2 - 1/c,
    valid for 0 < c < t* min(w) / 2.  With strict=False the lower formula is
    evaluated outside its validity range (asymptotic-target usage) instead of
    raising.
    """
    if c <= 0:
        raise ValueError("need c > 0")
    w = spec.card_weights
    min_w = float(w.min())
    min_w_sq = float((w**2).min())
    t_star = solve_t_star(spec)
    c_cap = t_star * min_w / 2.0
    if strict and not c < c_cap:
        raise ValueError(
            f"lower bound requires c < t*.min(w)/2 = {c_cap:.6g}; got c = {c}"
        )
    slack = (4.0 * min_w_sq * t_star + 2.0 * c * min_w) / c**2
    upper_raw = 1.0 - math.exp(-math.exp(-c / 2.0) / 2.0) + slack
    lower_raw = (
        1.0
        - math.exp(-math.exp(c / 2.0) / 2.0)
        - (4.0 * min_w_sq * t_star - 2.0 * c * min_w) / c**2
        - 1.0 / c
    )
    upper_value = min(max(upper_raw, 0.0), 1.0)
    lower_value = min(max(lower_raw, 0.0), 1.0)
    return TsetlinBoundReport(
        t_star=t_star,
        c=c,
        upper_time=t_star + c / min_w,
        upper_value=upper_value,
        lower_time=t_star - 2.0 * c / min_w,
        lower_value=lower_value,
        upper_clamped=upper_value != upper_raw,
        lower_clamped=lower_value != lower_raw,
        t_star_min_w=t_star * min_w,
        t_star_min_w_sq=t_star * min_w_sq,
    )


def _signed_subset_sums(weights):
    """All (parity sign, subset weight sum) pairs over subsets of ``weights``."""
    sums = np.array([0.0])
    signs = np.array([1.0])
    for w in weights:
        sums = np.concatenate([sums, sums + w])
        signs = np.concatenate([signs, -signs])
    return signs, sums


def tsetlin_survival_exact(spec, t, exact_cap=DEFAULT_TSETLIN_EXACT_CAP):
    """Exact P(T > t) for T = first time n-1 distinct cards are touched.

    P(T > t) = P(at least two cards untouched at t) = 1 - A(t) - B(t) with
    A(t) = P(all touched) and B(t) = P(exactly one untouched), both by
    inclusion-exclusion over card subsets.
    """
    return tsetlin_survival_profile(spec, [t], exact_cap)[int(t)]


def tsetlin_survival_profile(spec, t_grid, exact_cap=DEFAULT_TSETLIN_EXACT_CAP):
    n = spec.n
    if n > exact_cap:
        raise CapacityError(
            f"n={n} exceeds the 2^n cap {exact_cap}; use sample_card_collection_T"
        )
    w = spec.card_weights
    all_signs, all_sums = _signed_subset_sums(w)
    per_card = []
    for i in range(n):
        others = np.delete(w, i)
        s_signs, s_sums = _signed_subset_sums(others)
        per_card.append((s_signs, w[i] + s_sums))
    out = {}
    for t in t_grid:
        t = int(t)
        if t < n - 1:
            out[t] = 1.0
            continue
        A = float((all_signs * (1.0 - all_sums) ** t).sum())
        B = 0.0
        for s_signs, s_sums in per_card:
            B += float((s_signs * (1.0 - s_sums) ** t).sum())
        out[t] = float(np.clip(1.0 - A - B, 0.0, 1.0))
    return out


def sample_card_collection_T(spec, trials, seed):
    """Monte Carlo samples of T = first time n-1 distinct cards are touched.

    Uniform weights use the exact geometric decomposition (waiting times
    between distinct cards are independent geometrics); general weights fall
    back to direct per-trial simulation.
    """
    n = spec.n
    w = spec.card_weights
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    if np.ptp(w) <= 1e-15:
        total = np.zeros(trials, dtype=np.int64)
        for j in range(n - 1):
            total += rng.geometric((n - j) / n, size=trials)
        return total
    out = np.empty(trials, dtype=np.int64)
    cdf = np.cumsum(w)
    for k in range(trials):
        touched = np.zeros(n, dtype=bool)
        count, t = 0, 0
        while count < n - 1:
            block = np.searchsorted(cdf, rng.random(256))
            for card in block:
                t += 1
                if not touched[card]:
                    touched[card] = True
                    count += 1
                    if count == n - 1:
                        break
        out[k] = t
    return out


def sample_kset_coupon_T(m, k, trials, seed):
    """Samples of T for the coupon process that collects a uniform k-subset
    of [m] per step; T = first time all m coupons are held.

    Matches the chamber-walk T for the non-local hypercube walk (signs never
    matter for T).  Vectorized across trials.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    touched = np.zeros((trials, m), dtype=bool)
    counts = np.zeros(trials, dtype=np.int64)
    T = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials)
    t = 0
    while active.size:
        t += 1
        # uniform k-subset per active trial via a partial Fisher-Yates draw
        picks = np.empty((active.size, k), dtype=np.int64)
        chosen = np.full((active.size, k), -1, dtype=np.int64)
        for j in range(k):
            r = rng.integers(0, m - j, size=active.size)
            # map r past the already-chosen values (k is small: direct fix-up)
            for prev in range(j):
                r += r >= np.sort(chosen[:, :j], axis=1)[:, prev]
            chosen[:, j] = r
            picks[:, j] = r
        for j in range(k):
            col = picks[:, j]
            newly = ~touched[active, col]
            touched[active, col] = True
            counts[active] += newly
        done = counts[active] == m
        if done.any():
            T[active[done]] = t
            active = active[~done]
    return T
