"""Command-line front end.

Subcommands dispatch into the library and emit self-describing records
(CSV with 12 significant digits, or JSON with one object per line).
Parameters may come from a ``key = value`` config file; flags override
file values. Exit codes: 0 success, 2 usage error, 3 domain error.
"""

import argparse
import json
import math
import sys

from . import __version__, bounds, figures, montecarlo, optimizer
from .channel import SystemConfig, mse_variance
from .errors import DomainError
from .montecarlo import SimulationSpec

LN2 = math.log(2.0)

COMMANDS = ("bounds", "optimize", "sweep", "simulate", "asymptotics", "figure")

# output fields holding per-channel-use rates; these are the only values
# the log-base flag rescales
RATE_FIELDS = frozenset([
    "lower", "upper", "rate", "mean", "std_err",
    "offset_upper", "offset_lower", "y",
])


class UsageError(Exception):
    pass


def parse_config_file(path):
    """Read `key = value` lines, skipping blanks and # comments."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_common(p):
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--channel", choices=["miso", "mimo"])
    p.add_argument("--nt", type=int)
    p.add_argument("--nrbar", type=float)
    p.add_argument("--snr-db", type=float, dest="snr_db")
    p.add_argument("--lbar", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--tbar", type=float)
    p.add_argument("--bbar", type=float)
    p.add_argument("--sigma-w2", type=float, dest="sigma_w2")
    p.add_argument("--bound", choices=["lower", "upper"])
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--log-base", choices=["e", "2"], dest="log_base")
    p.add_argument("--format", choices=["csv", "json"], dest="out_format")
    p.add_argument("--output", help="output path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamopt",
        description="Rates and overhead optimization for limited-feedback "
        "beamforming over block-fading channels.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "figure":
            p.add_argument("--name", choices=list(figures.FIGURE_NAMES))
    return parser


# per-field coercion when values come from a config file
_COERCE = {
    "nt": int, "trials": int, "seed": int, "workers": int,
    "nrbar": float, "snr_db": float, "lbar": float, "mu": float,
    "tbar": float, "bbar": float, "sigma_w2": float,
}

_DEFAULTS = {
    "channel": "miso", "lbar": 1.0, "mu": 1.0, "bound": "lower",
    "trials": 10_000, "seed": 0, "workers": 1, "log_base": "e",
    "out_format": "csv",
    "bbar": 0.0,
}


def resolve_params(args):
    """Merge defaults, config file, and flags (flags win)."""
    params = dict(_DEFAULTS)
    if getattr(args, "config", None):
        for key, val in parse_config_file(args.config).items():
            if key in _COERCE:
                try:
                    val = _COERCE[key](val)
                except ValueError as exc:
                    raise UsageError(f"config value for {key}: {exc}")
            params[key] = val
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        params[key] = val
    return params


def _system_config(params):
    if params.get("nt") is None:
        raise UsageError("--nt is required")
    if params.get("snr_db") is None:
        raise UsageError("--snr-db is required")
    n_t = params["nt"]
    n_r = 1
    if params["channel"] == "mimo":
        if params.get("nrbar") is None:
            raise UsageError("--nrbar is required for mimo")
        n_r = max(1, round(params["nrbar"] * n_t))
    return SystemConfig(
        n_t=n_t,
        snr=10.0 ** (params["snr_db"] / 10.0),
        l_bar=params["lbar"],
        mu=params["mu"],
        n_r=n_r,
    )


def _echo(params, config):
    out = {
        "command": params["command_name"],
        "channel": params["channel"],
        "nt": config.n_t,
        "nrbar": config.n_r_bar if params["channel"] == "mimo" else "",
        "snr_db": params["snr_db"],
        "lbar": config.l_bar,
        "mu": config.mu,
        "bound": params["bound"],
        "seed": params["seed"],
        "units": "bits" if params["log_base"] == "2" else "nats",
        "version": __version__,
    }
    for key in ("tbar", "bbar", "sigma_w2", "trials"):
        out[key] = params.get(key, "")
    return out


def cmd_bounds(params):
    config = _system_config(params)
    kwargs = {"b_bar": params["bbar"]}
    if params.get("tbar") is not None:
        kwargs["t_bar"] = params["tbar"]
    if params.get("sigma_w2") is not None:
        kwargs["sigma_w2"] = params["sigma_w2"]
    if params["channel"] == "mimo":
        cb = bounds.mimo_capacity_bounds(config, **kwargs)
    else:
        cb = bounds.miso_capacity_bounds(config, **kwargs)
    rec = _echo(params, config)
    rec.update(lower=cb.lower, upper=cb.upper)
    return [rec]


def cmd_optimize(params):
    config = _system_config(params)
    res = optimizer.optimize_allocation(config, params["channel"], params["bound"])
    a = res.allocation
    rec = _echo(params, config)
    rec.update(
        tbar=a.t_bar, bbar=a.b_bar, dbar=a.d_bar, rate=res.rate.value,
        at_feedback_cap=res.at_feedback_cap, iterations=res.iterations,
    )
    return [rec]


def cmd_sweep(params):
    config = _system_config(params)
    ratio = 1.0
    if params.get("tbar") is not None and params.get("bbar"):
        ratio = params["tbar"] / (config.mu * params["bbar"])
    rows = optimizer.sweep_overhead(config, params["channel"], params["bound"], ratio)
    records = []
    for frac, rate in rows:
        overhead = frac * config.l_bar
        b_bar = overhead / (config.mu * (1.0 + ratio))
        rec = _echo(params, config)
        rec.update(
            overhead_fraction=frac,
            tbar=ratio * config.mu * b_bar, bbar=b_bar, rate=rate,
        )
        records.append(rec)
    return records


def cmd_simulate(params):
    config = _system_config(params)
    if params.get("sigma_w2") is not None:
        sigma_w2 = params["sigma_w2"]
    elif params.get("tbar") is not None:
        sigma_w2 = mse_variance(params["tbar"], config.snr)
    else:
        raise UsageError("simulate needs --sigma-w2 or --tbar")
    bits = round(params["bbar"] * config.n_t)
    spec = SimulationSpec(
        trials=params["trials"], seed=params["seed"], workers=params["workers"]
    )
    if params["bound"] == "upper":
        est = montecarlo.simulate_genie_rate(config, sigma_w2, bits, spec)
    else:
        est = montecarlo.simulate_lower_rate(config, sigma_w2, bits, spec)
    rec = _echo(params, config)
    rec.update(mean=est.mean, std_err=est.std_err, trials=est.trials, bits=bits)
    return [rec]


def cmd_asymptotics(params):
    config = _system_config(params)
    pred = optimizer.asymptotic_prediction(config, params["channel"])
    rec = _echo(params, config)
    rec.update(
        tbar_pred=pred.t_bar_pred,
        bbar_pred=pred.b_bar_pred,
        offset_upper=pred.offset_upper,
        offset_lower=pred.offset_lower,
        data_fraction_pred=pred.data_fraction_pred,
    )
    return [rec]


def cmd_figure(params):
    name = params.get("name")
    if not name:
        raise UsageError("figure needs --name fig1..fig6")
    rows, x_label, y_label = figures.figure_rows(
        name, trials=params["trials"],
        seed=params["seed"] if params["seed"] else None,
    )
    records = []
    for row in rows:
        records.append({
            "figure": name, "curve": row["curve"], "x": row["x"], "y": row["y"],
            "x_label": x_label, "y_label": y_label,
            "units": "bits" if params["log_base"] == "2" else "nats",
            "version": __version__,
        })
    if params.get("output") and name in figures.RATE_FIGURES:
        png = params["output"].rsplit(".", 1)[0] + ".png"
        scale = LN2 if params["log_base"] == "2" else 1.0
        plot_rows = [dict(r, y=r["y"] / scale) for r in rows]
        figures.render_png(plot_rows, x_label, y_label, png, title=name)
    elif params.get("output"):
        png = params["output"].rsplit(".", 1)[0] + ".png"
        figures.render_png(rows, x_label, y_label, png, title=name)
    return records


def _format_value(value, to_bits, is_rate):
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        if to_bits and is_rate and math.isfinite(value):
            value = value / LN2
        return f"{value:.12g}"
    return value


def _convert(records, log_base):
    to_bits = log_base == "2"
    out = []
    for rec in records:
        is_rate_fig = rec.get("figure") in figures.RATE_FIGURES
        row = {}
        for key, val in rec.items():
            is_rate = key in RATE_FIELDS and (key != "y" or is_rate_fig)
            row[key] = _format_value(val, to_bits, is_rate)
        out.append(row)
    return out


def emit(records, log_base, out_format, output):
    rows = _convert(records, log_base)
    lines = []
    if out_format == "json":
        for row in rows:
            lines.append(json.dumps(row))
    else:
        keys = list(rows[0].keys())
        lines.append(",".join(keys))
        for row in rows:
            lines.append(",".join(str(row.get(k, "")) for k in keys))
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


DISPATCH = {
    "bounds": cmd_bounds,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "asymptotics": cmd_asymptotics,
    "figure": cmd_figure,
}


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        params = resolve_params(args)
        params["command_name"] = args.command
        records = DISPATCH[args.command](params)
        emit(records, params["log_base"], params["out_format"], params.get("output"))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
