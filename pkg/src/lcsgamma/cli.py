"""Command-line entry point: ``lcsgamma <command> [flags]``.

Every output starts with the effective configuration (a ``#`` comment line
for text/CSV, a ``config`` object for JSON).  Exit status is 0 on success,
2 for invalid arguments and 3 when a resource budget would be exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .bounds import BoundReport, bound_table
from .codes import SweepRow, proposition_sweep
from .errors import ResourceError, ValidationError
from .greedy import coin_analytics, greedy_match, greedy_match_kary, simulate_coin_process
from .lcs import DEFAULT_CELL_BUDGET, diagonal_lcs, lcs_exact, table_cells
from .montecarlo import estimate_diagonal, estimate_gamma
from .strings import Params, Seed, StringEnsemble, sample_ensemble, to_text

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3
COMMANDS = ("lcs", "diag", "greedy", "coins", "bounds", "estimate", "codes", "table")
RANDOM_COMMANDS = {"coins", "estimate", "codes", "table"}

DEFAULTS = {
    "k": "2", "d": "2", "n": 100, "trials": 100, "budget": None, "seed": None,
    "tol": 1e-9, "format": "text", "workers": 1, "method": "exact-dp",
    "strings": None, "a": 0, "b": 1, "kind": "gamma", "sizes": "2",
    "p": None, "gamma_hat": None, "eps": "0.05", "mc": False,
}
FORMAT_DEFAULTS = {"bounds": "csv", "table": "csv", "codes": "csv"}
# execution details that must not change the bytes of a report
NOT_ECHOED = {"out", "workers", "config", "command"}


class UsageError(ValidationError):
    pass


def parse_int_list(text) -> list:
    """``"2,4,8"``, ``"2..14"`` or a mix such as ``"2..4,8"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"invalid grid {text!r}") from None
    return out


def parse_float_list(text) -> list:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"invalid number list {text!r}") from None


def single(text, name) -> int:
    values = parse_int_list(text)
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single integer here, got {text!r}")
    return values[0]


def load_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value.strip('"')
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcsgamma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--k", help="alphabet size (grid for bounds/table)")
        p.add_argument("--d", help="number of strings (grid for bounds/table)")
        p.add_argument("--n", type=int, help="string length")
        p.add_argument("--trials", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--seed", help="master seed; random and echoed if omitted")
        p.add_argument("--tol", type=float)
        p.add_argument("--format", choices=("json", "csv", "text"))
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--workers", type=int)
        p.add_argument("--witness", action="store_true", default=None)
        p.add_argument("--trace", action="store_true", default=None)
        p.add_argument("--config", help="key=value file; flags override it")
        if name in ("lcs", "diag", "greedy"):
            p.add_argument("--strings", help="comma-separated base-36 strings")
        if name == "greedy":
            p.add_argument("--a", type=int, help="first kept symbol for k > 2")
            p.add_argument("--b", type=int, help="second kept symbol for k > 2")
        if name in ("estimate", "table"):
            p.add_argument("--method", choices=("exact-dp", "greedy"))
        if name == "estimate":
            p.add_argument("--kind", choices=("gamma", "diagonal"))
        if name == "table":
            p.add_argument("--mc", action="store_true", default=None,
                           help="add Monte Carlo columns at --n/--trials")
        if name == "codes":
            p.add_argument("--sizes", help="code sizes, e.g. 2,32")
            p.add_argument("--p", help="deletion fractions, comma separated")
            p.add_argument("--gamma-hat", dest="gamma_hat", type=float,
                           help="use p = 1 - gamma_hat +/- eps instead of --p")
            p.add_argument("--eps", help="offsets around 1 - gamma_hat")
    return parser


def resolve(args) -> dict:
    """Merge flags over the config file over built-in defaults."""
    cfg = dict(DEFAULTS)
    cfg["format"] = FORMAT_DEFAULTS.get(args.command, "text")
    cfg["witness"] = False
    cfg["trace"] = False
    if args.config:
        cfg.update(load_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None:
            cfg[key] = value
    for key in ("n", "trials", "workers", "a", "b"):
        cfg[key] = int(cfg[key])
    if cfg["budget"] is not None:
        cfg["budget"] = int(cfg["budget"])
    cfg["tol"] = float(cfg["tol"])
    for key in ("witness", "trace", "mc"):
        if isinstance(cfg[key], str):
            cfg[key] = cfg[key].lower() in ("1", "true", "yes")
    if cfg["format"] not in ("json", "csv", "text"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    if args.command in RANDOM_COMMANDS or (
            args.command in ("lcs", "diag", "greedy") and not cfg.get("strings")):
        cfg["seed"] = str(Seed.parse(cfg["seed"]) if cfg["seed"] is not None else Seed.fresh())
    else:
        cfg["seed"] = None
    cfg["command"] = args.command
    return cfg


def _ensemble(cfg) -> StringEnsemble:
    if cfg.get("strings"):
        k = single(cfg["k"], "k") if cfg.get("_k_given") else None
        return StringEnsemble.explicit(cfg["strings"].split(","), k=k)
    params = Params(single(cfg["k"], "k"), single(cfg["d"], "d"), cfg["n"])
    return sample_ensemble(params, Seed.parse(cfg["seed"]))


def cmd_lcs(cfg):
    ens = _ensemble(cfg)
    res = lcs_exact(ens, want_witness=cfg["witness"])
    row = {"length": res.length}
    if cfg["witness"]:
        row["witness"] = to_text(res.witness)
    return [row], None


def cmd_diag(cfg):
    ens = _ensemble(cfg)
    budget = cfg["budget"] if cfg["budget"] is not None else (
        sum(ens.lengths) if cfg.get("strings") else cfg["n"])
    res = diagonal_lcs(ens, budget)
    return [{"budget": res.budget, "value": res.value,
             "argmax_split": ";".join(map(str, res.argmax_split))}], None


def cmd_greedy(cfg):
    ens = _ensemble(cfg)
    budget = cfg["budget"] if cfg["budget"] is not None else ens.params.n * ens.d
    if ens.k == 2:
        res = greedy_match(ens, budget)
    else:
        res = greedy_match_kary(ens, budget, cfg["a"], cfg["b"])
    n = ens.params.n
    row = {"length": res.length, "rate": res.length / n if n else 0.0,
           "total_consumed": res.total_consumed, "budget": res.budget,
           "consumed": ";".join(map(str, res.consumed_per_string)),
           "exhausted": res.exhausted}
    if cfg["witness"]:
        row["matched"] = to_text(res.matched)
    trace = list(res.trace_lines()) if cfg["trace"] else None
    return [row], trace


def cmd_coins(cfg):
    d = single(cfg["d"], "d")
    samples = simulate_coin_process(d, Seed.parse(cfg["seed"]), cfg["trials"], cfg["workers"])
    exact = coin_analytics(d)
    return [{
        "d": d, "trials": len(samples),
        "mean_Y": float(samples.minority.mean()), "mean_Z": samples.mean_flips(),
        "stderr_Z": samples.stderr_flips(),
        "expected_Y": str(exact.expected_Y), "expected_Z": str(exact.expected_Z),
        "c_hat": exact.c_hat,
    }], None


def _grid(cfg):
    return parse_int_list(cfg["k"]), parse_int_list(cfg["d"])


def cmd_bounds(cfg):
    ks, ds = _grid(cfg)
    return [r.as_row() for r in bound_table(ks, ds, cfg["tol"])], None


def cmd_estimate(cfg):
    params = Params(single(cfg["k"], "k"), single(cfg["d"], "d"), cfg["n"])
    seed = Seed.parse(cfg["seed"])
    if cfg["kind"] == "diagonal":
        budget = cfg["budget"] if cfg["budget"] is not None else params.n * params.d
        rep = estimate_diagonal(params, budget, cfg["trials"], seed, cfg["workers"])
    else:
        rep = estimate_gamma(params, cfg["trials"], seed, cfg["method"], cfg["workers"])
    return [rep.as_dict()], None


def cmd_codes(cfg):
    if cfg["gamma_hat"] is not None:
        g = float(cfg["gamma_hat"])
        p_grid = []
        for e in parse_float_list(cfg["eps"]):
            p_grid += [1 - g - e, 1 - g + e]
    elif cfg["p"]:
        p_grid = parse_float_list(cfg["p"])
    else:
        raise UsageError("codes needs --p or --gamma-hat")
    rows = proposition_sweep(single(cfg["k"], "k"), cfg["n"], single(cfg["d"], "d"),
                             parse_int_list(cfg["sizes"]), p_grid, cfg["trials"],
                             Seed.parse(cfg["seed"]), cfg["workers"])
    return [row.__dict__.copy() for row in rows], None


def cmd_table(cfg):
    ks, ds = _grid(cfg)
    rows = []
    seed = Seed.parse(cfg["seed"])
    for rep in bound_table(ks, ds, cfg["tol"]):
        row = rep.as_row()
        if cfg["mc"]:
            row.update(_mc_cells(rep, cfg, seed))
        rows.append(row)
    return rows, None


def _mc_cells(rep, cfg, seed):
    n, method = cfg["n"], cfg["method"]
    if method == "exact-dp" and table_cells([n] * rep.d) > DEFAULT_CELL_BUDGET:
        return {"mc_mean": 0.0, "mc_ci_low": 0.0, "mc_ci_high": 0.0, "mc_flag": "skipped"}
    est = estimate_gamma(Params(rep.k, rep.d, n), cfg["trials"], seed.child(rep.k).child(rep.d),
                         method, cfg["workers"])
    return {"mc_mean": est.mean, "mc_ci_low": est.ci_low, "mc_ci_high": est.ci_high,
            "mc_flag": method}


HANDLERS = {
    "lcs": cmd_lcs, "diag": cmd_diag, "greedy": cmd_greedy, "coins": cmd_coins,
    "bounds": cmd_bounds, "estimate": cmd_estimate, "codes": cmd_codes, "table": cmd_table,
}

MC_COLUMNS = ("mc_mean", "mc_ci_low", "mc_ci_high", "mc_flag")
TABLE_COLUMNS = {
    "bounds": BoundReport.CSV_COLUMNS,
    "table": BoundReport.CSV_COLUMNS,
    "codes": SweepRow.CSV_COLUMNS,
}


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def render(cfg, rows, trace) -> str:
    echo = {k: v for k, v in sorted(cfg.items()) if k not in NOT_ECHOED and not k.startswith("_")}
    fmt = cfg["format"]
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": cfg["command"], "config": echo,
               "results": rows}
        if trace is not None:
            doc["trace"] = trace
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    header = "# " + cfg["command"] + " " + " ".join(f"{k}={_cell(v)}" for k, v in echo.items())
    out = io.StringIO()
    out.write(header + "\n")
    if trace is not None:
        out.write("# round majority Y consumption cumulative\n")
        for line in trace:
            out.write("# " + line + "\n")
    columns = list(TABLE_COLUMNS.get(cfg["command"], rows[0].keys() if rows else ()))
    if cfg["command"] == "table" and cfg["mc"]:
        columns += MC_COLUMNS
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
    elif cfg["command"] == "lcs" and not cfg["witness"]:
        out.write(f"{rows[0]['length']}\n")
    else:
        for row in rows:
            out.write(" ".join(f"{c}={_cell(row[c])}" for c in columns) + "\n")
    return out.getvalue()


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        cfg["_k_given"] = args.k is not None or "k" in (
            load_config_file(args.config) if args.config else {})
        rows, trace = HANDLERS[args.command](cfg)
        text = render(cfg, rows, trace)
    except ResourceError as exc:
        print(f"lcsgamma: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValidationError, OSError) as exc:
        print(f"lcsgamma: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
