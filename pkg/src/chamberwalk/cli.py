"""Batch experiment harness.

Subcommands: exact, mc, bounds, cutoff, glauber, list.  Experiments are
described by key=value parameters (from --params tokens and/or a flat
key=value config file) and write CSV with a '#' metadata preamble; output
is byte-identical for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .core import build_boolean, build_braid
from .exact import (
    coupling_parameters,
    cutoff_prediction,
    separation_profile,
    survival_exact_profile,
    total_variation_profile,
)
from .gallery import (
    TsetlinSpec,
    hypercube_nn_faces,
    hypercube_nonlocal_faces,
    k_to_top_faces,
    kset_coupling_closed_form,
    riffle_coupling_closed_form,
    riffle_faces,
    sample_card_collection_T,
    sample_kset_coupon_T,
    top_bottom_faces,
    tsetlin_bounds,
    tsetlin_faces,
)
from .glauber import (
    coupon_survival_uniform,
    glauber_separation_profile,
    ising_system,
    product_system,
)
from .walk import estimate_survival, survival_from_samples

SEED_ENV_VAR = "CHAMBERWALK_SEED"
PRNG_NAME = "numpy-pcg64"

CSV_HEADER = "t,s_exact,tv_exact,survival_exact,survival_mc,mc_stderr"

FAMILIES = {
    "tsetlin": "move-to-front on the braid arrangement; s(t) = P(T>t) "
    "under uniform card weights",
    "riffle": "inverse a-shuffle; s(t) = P(T>t) under uniform marks; "
    "closed-form cutoff parameters b=1-1/a, d=(1-1/a)^2",
    "k-to-top": "k random cards to top; closed-form cutoff parameters "
    "b=k/n, d=k^2/n^2-k(n-k)/(n^2(n-1))",
    "top-bottom": "random card to top or bottom; s(t) = P(T>t) under "
    "uniform card weights",
    "hypercube-nn": "weighted nearest-neighbor hypercube walk; "
    "s(t) = P(T>t) when w_i^+ = w_i^-",
    "hypercube-nonlocal": "flip k random coordinates; closed-form cutoff "
    "parameters b=k/n, d=k^2/n^2-k(n-k)/(n^2(n-1))",
    "ising": "ferromagnetic Ising Glauber dynamics (glauber mode; "
    "--width --height --beta --field as params)",
    "product": "independent-spin Glauber sanity system (glauber mode)",
}


class ConfigError(ValueError):
    pass


def _parse_number(tok):
    tok = tok.strip()
    if "/" in tok:
        num, den = tok.split("/")
        return float(num) / float(den)
    return float(tok)


def _parse_value(raw):
    raw = raw.strip()
    if "," in raw:
        return [_parse_number(x) for x in raw.split(",") if x.strip()]
    return raw


def parse_params(tokens):
    params = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, raw = tok.split("=", 1)
        params[key.strip()] = _parse_value(raw)
    return params


def read_config_file(path):
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                tokens.append(line)
    return parse_params(tokens)


def parse_t_grid(spec):
    """Parse '1..10', '0..40..2' or '1,2,5' into an increasing integer list."""
    if isinstance(spec, list):
        grid = [int(x) for x in spec]
    else:
        spec = str(spec)
        if ".." in spec:
            parts = spec.split("..")
            if len(parts) == 2:
                start, stop, step = int(parts[0]), int(parts[1]), 1
            elif len(parts) == 3:
                start, stop, step = int(parts[0]), int(parts[1]), int(parts[2])
            else:
                raise ConfigError(f"bad t-grid {spec!r}")
            grid = list(range(start, stop + 1, step))
        else:
            grid = [int(float(x)) for x in spec.split(",") if x.strip()]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("t-grid must be nonempty and strictly increasing")
    return grid


def _get_int(params, key, default=None):
    if key not in params:
        if default is None:
            raise ConfigError(f"missing required parameter {key!r}")
        return default
    v = params[key]
    return int(float(v)) if not isinstance(v, list) else int(v[0])


def _get_float(params, key, default=None):
    if key not in params:
        if default is None:
            raise ConfigError(f"missing required parameter {key!r}")
        return default
    v = params[key]
    return float(v) if not isinstance(v, list) else float(v[0])


def _get_weights(params, key, n=None):
    if key not in params:
        if n is None:
            raise ConfigError(f"missing required parameter {key!r}")
        return np.full(n, 1.0 / n)
    v = params[key]
    if not isinstance(v, list):
        v = [_parse_number(v)]
    return np.asarray(v, dtype=float)


def build_family(family, params):
    """Resolve a family name into (arrangement, weighted faces, info).

    info carries an optional fast T sampler and closed-form (b, d) for
    families with one; exact machinery uses the explicit (arr, w) pair.
    """
    info = {"t_sampler": None, "bd": None}
    if family == "tsetlin":
        weights = _get_weights(params, "weights", _get_int(params, "n", 0) or None)
        spec = TsetlinSpec(weights)
        info["t_sampler"] = lambda trials, seed: sample_card_collection_T(spec, trials, seed)
        info["spec"] = spec
        n = spec.n
        arr = w = None
        if math.factorial(n) <= 10_000:
            arr = build_braid(n)
            w = tsetlin_faces(spec)
        return arr, w, info
    if family == "riffle":
        n = _get_int(params, "n")
        a = _get_int(params, "a", 2)
        info["bd"] = riffle_coupling_closed_form(a)
        arr = build_braid(n)
        return arr, riffle_faces(n, a), info
    if family == "k-to-top":
        n, k = _get_int(params, "n"), _get_int(params, "k")
        info["bd"] = kset_coupling_closed_form(n, k)
        arr = build_braid(n)
        return arr, k_to_top_faces(n, k), info
    if family == "top-bottom":
        n = _get_int(params, "n")
        weights = _get_weights(params, "weights", n)
        arr = build_braid(n)
        return arr, top_bottom_faces(n, weights), info
    if family == "hypercube-nn":
        n = _get_int(params, "n")
        w_plus = _get_weights(params, "w_plus", None) if "w_plus" in params else None
        w_minus = _get_weights(params, "w_minus", None) if "w_minus" in params else None
        if w_plus is None:
            w_plus = np.full(n, 1.0 / (2 * n))
        if w_minus is None:
            w_minus = np.full(n, 1.0 / (2 * n))
        arr = build_boolean(n)
        return arr, hypercube_nn_faces(w_plus, w_minus), info
    if family == "hypercube-nonlocal":
        n, k = _get_int(params, "n"), _get_int(params, "k")
        info["bd"] = kset_coupling_closed_form(n, k)
        info["t_sampler"] = lambda trials, seed: sample_kset_coupon_T(
            n, k, trials, seed
        )
        arr = w = None
        if math.comb(n, k) * 2**k <= 100_000 and 2**n <= 10_000:
            arr = build_boolean(n)
            w = hypercube_nonlocal_faces(n, k)
        return arr, w, info
    raise ConfigError(f"unknown family {family!r}; see the list subcommand")


def build_glauber_family(family, params):
    if family == "ising":
        return ising_system(
            _get_int(params, "width"),
            _get_int(params, "height"),
            _get_float(params, "beta", 0.0),
            _get_float(params, "field", 0.0),
        )
    if family == "product":
        return product_system(_get_int(params, "n"))
    raise ConfigError(f"unknown glauber family {family!r}")


def _fmt(x):
    return "" if x is None else format(float(x), ".12g")


def write_csv(out, meta, rows):
    lines = [f"# chamberwalk {__version__}"]
    for k, v in meta:
        lines.append(f"# {k}={v}")
    lines.append(CSV_HEADER)
    for row in rows:
        lines.append(",".join([str(int(row[0]))] + [_fmt(x) for x in row[1:]]))
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _meta(args, params, extra=()):
    meta = [
        ("family", args.family),
        ("params", " ".join(f"{k}={params[k]}" for k in sorted(params))),
        ("mode", args.command),
        ("seed", args.seed),
        ("trials", getattr(args, "trials", "")),
        ("prng", PRNG_NAME),
    ]
    meta.extend(extra)
    return meta


def cmd_exact(args, params):
    arr, w, _ = build_family(args.family, params)
    if arr is None:
        raise ConfigError("family instance too large for exact mode")
    grid = parse_t_grid(args.t_grid)
    sep = separation_profile(arr, w, grid)
    tv = total_variation_profile(arr, w, grid)
    surv = survival_exact_profile(arr, w, grid)
    rows = [(t, sep[t], tv[t], surv[t], None, None) for t in grid]
    write_csv(args.out, _meta(args, params), rows)


def cmd_mc(args, params):
    arr, w, info = build_family(args.family, params)
    grid = parse_t_grid(args.t_grid)
    if info["t_sampler"] is not None:
        samples = info["t_sampler"](args.trials, args.seed)
        est = survival_from_samples(samples, grid, seed=args.seed)
    else:
        est = estimate_survival(arr, w, grid, args.trials, args.seed)
    rows = [
        (t, None, None, None, p, se)
        for t, p, se in zip(est.t_values, est.p_hat, est.std_err)
    ]
    write_csv(args.out, _meta(args, params), rows)


def cmd_bounds(args, params):
    if args.family != "tsetlin":
        raise ConfigError("bounds mode applies to the tsetlin family")
    _, _, info = build_family(args.family, params)
    spec = info["spec"]
    c = _get_float(params, "c", 3.0)
    report = tsetlin_bounds(spec, c, strict=bool(_get_int(params, "strict", 0)))
    times = sorted(
        {max(0, math.ceil(report.lower_time)), math.ceil(report.upper_time)}
    )
    samples = info["t_sampler"](args.trials, args.seed)
    est = survival_from_samples(samples, times, seed=args.seed)
    extra = [
        ("t_star", _fmt(report.t_star)),
        ("c", _fmt(c)),
        ("upper_time", _fmt(report.upper_time)),
        ("upper_value", _fmt(report.upper_value)),
        ("lower_time", _fmt(report.lower_time)),
        ("lower_value", _fmt(report.lower_value)),
        ("t_star_min_w", _fmt(report.t_star_min_w)),
        ("t_star_min_w_sq", _fmt(report.t_star_min_w_sq)),
    ]
    rows = [
        (t, None, None, None, p, se)
        for t, p, se in zip(est.t_values, est.p_hat, est.std_err)
    ]
    write_csv(args.out, _meta(args, params, extra), rows)


def cmd_cutoff(args, params):
    arr, w, info = build_family(args.family, params)
    if info["bd"] is not None:
        b, d = info["bd"]
    elif arr is not None and w is not None:
        cp = coupling_parameters(arr, w)
        if cp.uniform_b is None or cp.uniform_d is None:
            raise ConfigError("b or d not constant; no cutoff prediction")
        b, d = cp.uniform_b, cp.uniform_d
    else:
        raise ConfigError("no closed-form b, d for this family instance")
    if args.family in ("hypercube-nn", "hypercube-nonlocal"):
        m = _get_int(params, "n")
    else:
        n = _get_int(params, "n")
        m = n * (n - 1) // 2
    pred = cutoff_prediction(b, d, m)
    if args.t_grid:
        grid = parse_t_grid(args.t_grid)
    else:
        lo = max(1, math.floor(pred.time - 4 * pred.window))
        hi = math.ceil(pred.time + 4 * pred.window)
        step = max(1, (hi - lo) // 32)
        grid = list(range(lo, hi + 1, step))
    if info["t_sampler"] is not None:
        samples = info["t_sampler"](args.trials, args.seed)
        est = survival_from_samples(samples, grid, seed=args.seed)
    else:
        est = estimate_survival(arr, w, grid, args.trials, args.seed)
    extra = [
        ("b", _fmt(b)),
        ("d", _fmt(d)),
        ("m", m),
        ("cutoff_time", _fmt(pred.time)),
        ("window", _fmt(pred.window)),
        ("assumptions_ok", pred.assumptions_ok),
    ]
    rows = [
        (t, None, None, None, p, se)
        for t, p, se in zip(est.t_values, est.p_hat, est.std_err)
    ]
    write_csv(args.out, _meta(args, params, extra), rows)


def cmd_glauber(args, params):
    sys_ = build_glauber_family(args.family, params)
    grid = parse_t_grid(args.t_grid)
    prof = glauber_separation_profile(sys_, grid)
    rows = [
        (t, prof[t][0], None, coupon_survival_uniform(sys_.n_sites, t), None, None)
        for t in grid
    ]
    write_csv(args.out, _meta(args, params), rows)


def cmd_list(args, params):
    print("available families:")
    for name, desc in FAMILIES.items():
        print(f"  {name}: {desc}")
    print(f"default seed env var: {SEED_ENV_VAR}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="chamberwalk",
        description="chamber-walk mixing experiments: exact distances, "
        "stopping-time Monte Carlo, bounds, cutoff profiles, Glauber dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("exact", cmd_exact),
        ("mc", cmd_mc),
        ("bounds", cmd_bounds),
        ("cutoff", cmd_cutoff),
        ("glauber", cmd_glauber),
        ("list", cmd_list),
    ]:
        p = sub.add_parser(name)
        p.set_defaults(func=fn)
        if name == "list":
            continue
        p.add_argument("--family", default=None)
        p.add_argument(
            "--params",
            nargs="*",
            default=[],
            help="key=value tokens; lists comma-separated, fractions like 1/3 ok",
        )
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--t-grid", default=None, help="e.g. 1..30 or 1,2,5")
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    args = parser.parse_args(argv)
    if args.command == "list":
        cmd_list(args, {})
        return 0

    try:
        return _run(args)
    except ConfigError as exc:
        parser.error(str(exc))


def _run(args):
    params = {}
    if args.config:
        params.update(read_config_file(args.config))
    params.update(parse_params(args.params))
    # config-file fallbacks for the harness-level settings
    if args.family is None:
        args.family = params.pop("family", None)
        if args.family is None:
            raise ConfigError("missing family")
    for key in ("family", "mode"):
        params.pop(key, None)
    if args.t_grid is None:
        args.t_grid = params.pop("t", params.pop("t_grid", None))
    else:
        params.pop("t", None), params.pop("t_grid", None)
    if args.seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        args.seed = int(params.pop("seed", env if env is not None else 0))
    if "trials" in params:
        args.trials = int(float(params.pop("trials")))
    if args.command != "cutoff" and args.t_grid is None:
        raise ConfigError("missing t-grid")
    args.func(args, params)
    return 0


if __name__ == "__main__":
    sys.exit(main())
