"""Heat-bath Glauber dynamics on monotone spin systems.

Single-site conditionals, the shared-randomness (grand) coupling, stochastic
domination checks, the exact chain on tiny systems, and the uniform
coupon-collector lower bounds on separation and total variation mixing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import CapacityError

DEFAULT_SITE_CAP = 12
DEFAULT_STATE_CAP = 4096


@dataclass(frozen=True)
class MonotoneSystem:
    """Finite spin system: sites, a totally ordered spin alphabet, and an
    unnormalized log weight over configurations S^V."""

    n_sites: int
    spins: tuple
    log_weight: callable
    name: str = "custom"

    def configurations(self, state_cap=DEFAULT_STATE_CAP):
        count = len(self.spins) ** self.n_sites
        if count > state_cap:
            raise CapacityError(f"{count} configurations exceeds cap {state_cap}")
        return list(itertools.product(self.spins, repeat=self.n_sites))

    @property
    def top(self):
        return (max(self.spins),) * self.n_sites

    @property
    def bottom(self):
        return (min(self.spins),) * self.n_sites


def grid_edges(width, height):
    edges = []
    for y in range(height):
        for x in range(width):
            u = y * width + x
            if x + 1 < width:
                edges.append((u, u + 1))
            if y + 1 < height:
                edges.append((u, u + width))
    return edges


def ising_system(width, height, beta, field=0.0, site_cap=DEFAULT_SITE_CAP):
    """Ferromagnetic Ising model on a width x height grid, free boundary."""
    if beta < 0:
        raise ValueError("antiferromagnetic coupling (beta < 0) is not monotone")
    n = width * height
    if n > site_cap:
        raise CapacityError(f"{n} sites exceeds exact-mode cap {site_cap}")
    edges = grid_edges(width, height)

    def log_weight(sigma):
        e = sum(sigma[u] * sigma[v] for u, v in edges)
        return beta * e + field * sum(sigma)

    return MonotoneSystem(
        n_sites=n, spins=(-1, 1), log_weight=log_weight, name=f"ising({width}x{height})"
    )


def product_system(n, probs_up=None):
    """Independent +-1 spins; sanity system with trivially monotone
    conditionals."""
    if probs_up is None:
        probs_up = [0.5] * n
    probs_up = list(probs_up)

    def log_weight(sigma):
        return sum(
            math.log(p if s > 0 else 1.0 - p) for s, p in zip(sigma, probs_up)
        )

    return MonotoneSystem(n_sites=n, spins=(-1, 1), log_weight=log_weight, name="product")


def conditional_at_site(sys, sigma, u):
    """Heat-bath conditional at site u given the rest of sigma; array over
    sys.spins in spin order."""
    logs = []
    for s in sys.spins:
        cfg = list(sigma)
        cfg[u] = s
        logs.append(sys.log_weight(tuple(cfg)))
    logs = np.array(logs)
    p = np.exp(logs - logs.max())
    p /= p.sum()
    return p


def glauber_step(sys, sigma, u, v):
    """Heat-bath update at site u driven by the uniform variate v.

    The new spin is the inverse CDF of the conditional, with the CDF taken
    in spin order; sharing (u, v) across configurations realizes the
    monotone grand coupling.
    """
    p = conditional_at_site(sys, sigma, u)
    cdf = np.cumsum(p)
    idx = int(np.searchsorted(cdf, v, side="right"))
    idx = min(idx, len(sys.spins) - 1)
    out = list(sigma)
    out[u] = sys.spins[idx]
    return tuple(out)


def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def comparable_pairs(configs):
    for a in configs:
        for b in configs:
            if a != b and _leq(a, b):
                yield a, b


def check_monotone(sys, state_cap=DEFAULT_STATE_CAP, tol=1e-12):
    """Verify stochastic domination of single-site conditionals.

    For every comparable pair sigma <= tau and every site, the conditional
    at tau must dominate the one at sigma (its CDF pointwise below).
    Returns (True, None) or (False, witness) with the violating
    (sigma, tau, site).
    """
    configs = sys.configurations(state_cap)
    for sigma, tau in comparable_pairs(configs):
        for u in range(sys.n_sites):
            cdf_s = np.cumsum(conditional_at_site(sys, sigma, u))
            cdf_t = np.cumsum(conditional_at_site(sys, tau, u))
            if np.any(cdf_t > cdf_s + tol):
                return False, (sigma, tau, u)
    return True, None


def stationary_distribution(sys, state_cap=DEFAULT_STATE_CAP):
    configs = sys.configurations(state_cap)
    logs = np.array([sys.log_weight(c) for c in configs])
    p = np.exp(logs - logs.max())
    return configs, p / p.sum()


def glauber_matrix(sys, state_cap=DEFAULT_STATE_CAP):
    """Exact transition matrix: pick a uniform site, resample from its
    conditional."""
    configs, pi = stationary_distribution(sys, state_cap)
    index = {c: i for i, c in enumerate(configs)}
    n = sys.n_sites
    P = np.zeros((len(configs), len(configs)))
    for i, sigma in enumerate(configs):
        for u in range(n):
            p = conditional_at_site(sys, sigma, u)
            for s, ps in zip(sys.spins, p):
                cfg = list(sigma)
                cfg[u] = s
                P[i, index[tuple(cfg)]] += ps / n
    return configs, pi, P


def glauber_separation_exact(sys, t, state_cap=DEFAULT_STATE_CAP):
    """Exact separation distance at time t, plus the top-to-bottom ratio
    1 - P^t(top, bottom) / pi(bottom) the lower-bound argument uses."""
    res = glauber_separation_profile(sys, [t], state_cap)
    return res[int(t)]


def glauber_separation_profile(sys, t_grid, state_cap=DEFAULT_STATE_CAP):
    configs, pi, P = glauber_matrix(sys, state_cap)
    index = {c: i for i, c in enumerate(configs)}
    i_top, i_bot = index[sys.top], index[sys.bottom]
    Pt = np.eye(len(configs))
    current = 0
    out = {}
    for t in sorted(set(int(t) for t in t_grid)):
        for _ in range(t - current):
            Pt = Pt @ P
        current = t
        s_t = float((1.0 - (Pt / pi[np.newaxis, :]).min(axis=1)).max())
        ratio = float(1.0 - Pt[i_top, i_bot] / pi[i_bot])
        out[t] = (s_t, ratio)
    return out


def coupon_survival_uniform(n, t):
    """P(some site unpicked after t uniform site selections), exactly:
    sum_j (-1)^(j+1) C(n,j) (1 - j/n)^t."""
    if n < 1:
        raise ValueError("need n >= 1")
    t = int(t)
    if t < n:
        return 1.0
    total = 0.0
    for j in range(1, n + 1):
        total += (-1) ** (j + 1) * math.comb(n, j) * (1.0 - j / n) ** t
    return float(np.clip(total, 0.0, 1.0))


def coverage_conditioned_law(sys, t, state_cap=DEFAULT_STATE_CAP):
    """Law of X^t started from the top configuration, conditioned on every
    site having been selected by time t.

    Runs the chain jointly with the set of sites selected so far (state
    space Omega x 2^V) and conditions on the full set.  Returns
    (configs, conditional law, P(all sites selected)).
    """
    configs, laws = coverage_conditioned_profile(sys, [t], state_cap)
    return (configs,) + laws[int(t)]


def coverage_conditioned_profile(sys, t_grid, state_cap=DEFAULT_STATE_CAP):
    """Grid version of coverage_conditioned_law: evolves the joint
    (configuration, selected-site set) chain once and reads off every t.
    Returns (configs, {t: (conditional law, coverage probability)})."""
    configs, pi, _ = glauber_matrix(sys, state_cap)
    index = {c: i for i, c in enumerate(configs)}
    n = sys.n_sites
    n_cfg = len(configs)
    full = (1 << n) - 1
    # joint distribution over (config, touched-mask), started at (top, empty)
    joint = np.zeros((n_cfg, full + 1))
    joint[index[sys.top], 0] = 1.0
    # precompute per-(config, site) update rows
    moves = {}
    for i, sigma in enumerate(configs):
        for u in range(n):
            p = conditional_at_site(sys, sigma, u)
            row = []
            for s, ps in zip(sys.spins, p):
                cfg = list(sigma)
                cfg[u] = s
                row.append((index[tuple(cfg)], ps))
            moves[i, u] = row
    out = {}
    t_grid = sorted(set(int(t) for t in t_grid))
    current = 0
    for t in t_grid:
        for _ in range(t - current):
            nxt = np.zeros_like(joint)
            nz_cfg, nz_mask = np.nonzero(joint)
            for i, mask in zip(nz_cfg, nz_mask):
                p0 = joint[i, mask]
                for u in range(n):
                    new_mask = mask | (1 << u)
                    for j, ps in moves[i, u]:
                        nxt[j, new_mask] += p0 * ps / n
            joint = nxt
        current = t
        covered = joint[:, full]
        p_cov = covered.sum()
        if p_cov <= 0:
            raise ValueError(f"coverage event has zero probability at t={t}")
        out[t] = (covered / p_cov, float(p_cov))
    return configs, out


@dataclass(frozen=True)
class MonotoneLowerBounds:
    sep_time: float
    sep_bound: float
    tv_time: float
    tv_bound: float


def monotone_lower_bounds(n, c):
    """Uniform lower bounds for any n-site monotone system:
    s(n log n - cn) >= 1 - exp(-e^c) and
    d(n/2 log n - cn) >= 1/4 - exp(-e^c)/4."""
    if c <= 0:
        raise ValueError("need c > 0")
    sep_bound = 1.0 - math.exp(-math.exp(c))
    return MonotoneLowerBounds(
        sep_time=n * math.log(n) - c * n,
        sep_bound=sep_bound,
        tv_time=0.5 * n * math.log(n) - c * n,
        tv_bound=sep_bound / 4.0,
    )
