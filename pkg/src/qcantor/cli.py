"""Command-line experiment harness: ``qcantor <command> [options]``.

Every run is described by a :class:`~qcantor.config.RunConfig`; flags and
``--config`` files are two spellings of the same thing.  Output is a table
(CSV by default) whose ``#`` header echoes the configuration and version.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .basis import (as_fraction, log_rule, parse_rule, probe_divergence, probe_infinite_in_limit,
                    rational_stream, t_map, value_of_digits, digits_of_rational)
from .config import COMMANDS, RunConfig, config_items, make_config, parse_config
from .errors import ConfigError, DomainError, QCantorError
from .intsets import parse_set
from .moran import MoranSpec, fww_bounds, hdt_condition_probe, hdt_gamma_seq, theta_moran_spec
from .pattern import PatternIndex, choose_min, choose_uniform, theta_stream
from .report import ResultTable, to_csv, to_jsonl
from .stats import (count_block, count_blocks, density_estimate, digit_set, distinct_digits,
                    mass_dimension_estimate, normality_index, ratio_index, star_discrepancy)
from .witness import (UDSource, condition_probe, digitrange_stream, example1_params,
                      example2_params, lambda_stream, ndn_theta_params, pseudo_normal_stream)

OUT_DIR_ENV = "QCANTOR_OUT_DIR"
RATIO_DIGITS = (0, 1, 2, 3)


def _checkpoints(cfg: RunConfig) -> tuple[int, ...]:
    return cfg.checkpoints or (cfg.horizon,)


def _pattern(cfg: RunConfig, with_digits: bool = True):
    base = example1_params() if cfg.pattern == "example1" else example2_params(cfg.ell)
    if not with_digits:
        return base
    return ndn_theta_params(base.alpha, base.beta, base.s, base.t, base.upsilon,
                            seed=cfg.seed or 0, on_empty=cfg.on_empty, name=base.name)


def _ud_source(cfg: RunConfig) -> UDSource:
    kind = cfg.source if cfg.source in ("weyl-golden", "weyl-alpha", "scaled-non-ud") else "weyl-golden"
    return UDSource(kind, alpha=as_fraction(cfg.alpha) if cfg.alpha else None)


def _seq_arg(text: str, rational: bool):
    head, _, arg = text.partition(":")
    conv = as_fraction if rational else int
    try:
        if head == "const":
            v = conv(arg)
            return lambda k: v
        if head == "list":
            vals = [conv(a) for a in arg.split(",")]

            def at(k):
                if k > len(vals):
                    raise DomainError(f"{text}: no value at depth {k}")
                return vals[k - 1]
            return at
    except ValueError as exc:
        raise ConfigError(f"bad sequence {text!r}: {exc}") from None
    raise ConfigError(f"bad sequence {text!r}; use const:<v> or list:<v1,v2,...>")


# -- commands ---------------------------------------------------------------

def run_expand(cfg: RunConfig) -> ResultTable:
    Q = parse_rule(cfg.q)
    x = as_fraction(cfg.x)
    N = cfg.last
    digits = digits_of_rational(x, Q, N)
    table = ResultTable([("n", "int"), ("digit", "int"), ("partial", "exact"), ("t_map", "exact")])
    want = set(_checkpoints(cfg)) if cfg.checkpoints else None
    for n in range(1, N + 1):
        if want is None or n in want:
            table.add(n=n, digit=digits[n - 1], partial=value_of_digits(digits[:n], Q), t_map=t_map(x, Q, n))
    return table


def run_probe(cfg: RunConfig) -> ResultTable:
    cps = _checkpoints(cfg)
    if cfg.target == "divergence":
        table = ResultTable([("n", "int"), (f"q_n_{cfg.k}", "exact")])
        for n, v in probe_divergence(parse_rule(cfg.q), cfg.k, cps):
            table.add(**{"n": n, f"q_n_{cfg.k}": v})
        return table
    if cfg.target == "infinite":
        Q = parse_rule(cfg.q)
        table = ResultTable([("n", "int"), ("min_q_n_to_2n", "int")])
        for n in cps:
            table.add(n=n, min_q_n_to_2n=probe_infinite_in_limit(Q, (n, 2 * n)))
        return table
    params = _pattern(cfg, with_digits=cfg.target == "hdt")
    if cfg.target == "hdt":
        table = ResultTable([("n", "int"), ("hdt1", "float"), ("hdt2", "float")])
        for row in hdt_condition_probe(params, cps[-1], cps):
            table.add(n=row.n, hdt1=row.hdt1, hdt2=row.hdt2)
        return table
    table = ResultTable([("n", "int"), ("nq", "exact"), ("rnq", "exact"), ("dnq", "exact")])
    for row in condition_probe(params, cfg.k, cps[-1], cps):
        table.add(n=row.n, nq=row.nq, rnq=row.rnq, dnq=row.dnq)
    return table


def _stats_stream(cfg: RunConfig):
    Q = parse_rule(cfg.q)
    if cfg.source == "rational":
        return rational_stream(cfg.x, Q)
    if cfg.source == "random":
        return pseudo_normal_stream(Q, cfg.seed)
    raise ConfigError(f"metric {cfg.target} needs a digit source: rational or random")


def run_stats(cfg: RunConfig) -> ResultTable:
    cps = _checkpoints(cfg)
    metric = cfg.target
    if metric == "massdim":
        S = parse_set(cfg.set)
        table = ResultTable([("n", "int"), ("massdim", "float")])
        for n in cps:
            table.add(n=n, massdim=mass_dimension_estimate(S, n))
        return table
    if metric == "dstar" and cfg.source not in ("rational", "random"):
        src = _ud_source(cfg)
        table = ResultTable([("n", "int"), ("dstar", "exact")])
        for n in cps:
            table.add(n=n, dstar=star_discrepancy(src.points(n)))
        return table
    stream = _stats_stream(cfg)
    if metric == "dstar":
        table = ResultTable([("n", "int"), ("dstar", "exact")])
        for n in cps:
            table.add(n=n, dstar=star_discrepancy(stream.normalized(n)))
    elif metric == "count":
        table = ResultTable([("n", "int"), ("count", "int")])
        for n in cps:
            table.add(n=n, count=count_block(stream, cfg.block, n))
    elif metric == "nidx":
        table = ResultTable([("n", "int"), ("nidx", "exact")])
        for n in cps:
            table.add(n=n, nidx=normality_index(stream, None, cfg.block, n))
    elif metric == "ratio":
        table = ResultTable([("n", "int"), ("ratio", "exact")])
        for n in cps:
            table.add(n=n, ratio=ratio_index(stream, cfg.block, cfg.block2, n))
    elif metric == "distinct":
        table = ResultTable([("n", "int"), ("d_n", "int"), ("d_n_over_n", "exact")])
        for n in cps:
            d = distinct_digits(stream, n)
            table.add(n=n, d_n=d, d_n_over_n=Fraction(d, n))
    elif metric == "digitset":
        table = ResultTable([("n", "int"), ("size", "int"), ("members", "text")])
        for n in cps:
            w = digit_set(stream, n)
            table.add(n=n, size=len(w), members=";".join(map(str, w)))
    else:
        m = cfg.m or 10 ** 6
        table = ResultTable([("n", "int"), (f"density_below_{m}", "exact")])
        for n in cps:
            table.add(**{"n": n, f"density_below_{m}": density_estimate(digit_set(stream, n), m)})
    return table


def run_moran(cfg: RunConfig) -> ResultTable:
    if cfg.target == "gamma":
        params = _pattern(cfg)
        N = cfg.depth or _checkpoints(cfg)[-1]
        start = next(n for n in itertools.count(1) if params.t(n) > 0)
        table = ResultTable([("n", "int"), ("gamma", "float")])
        for n, g in enumerate(hdt_gamma_seq(params, N, start), start=start):
            table.add(n=n, gamma=g)
        return table
    if cfg.pattern is not None:
        spec = theta_moran_spec(_pattern(cfg))
    else:
        spec = MoranSpec(Fraction(1), _seq_arg(cfg.nk, False), _seq_arg(cfg.ck, True),
                         f"nk={cfg.nk},ck={cfg.ck}")
    rep = fww_bounds(spec, cfg.depth)
    table = ResultTable([("k", "int"), ("lower", "float"), ("upper", "float")])
    want = set(cfg.checkpoints) if cfg.checkpoints else None
    for k, (lo, up) in enumerate(zip(rep.lower, rep.upper), start=1):
        if want is None or k in want:
            table.add(k=k, lower=lo, upper=up)
    return table


def _ratio_extremes(stream, n: int):
    counts = count_blocks(stream, [(d,) for d in RATIO_DIGITS], n)
    vals = [counts[(d,)] for d in RATIO_DIGITS]
    if min(vals) == 0:
        return None, None
    return Fraction(min(vals), max(vals)), Fraction(max(vals), min(vals))


def construct_stream(cfg: RunConfig):
    horizon = cfg.horizon or cfg.last
    if cfg.target == "lambda":
        xi = pseudo_normal_stream(log_rule(), cfg.seed)
        return lambda_stream(parse_rule(cfg.q), _ud_source(cfg), xi, horizon, search_cap=cfg.search_cap)
    if cfg.target == "digitrange":
        return digitrange_stream(parse_rule(cfg.q), parse_set(cfg.set), horizon, seed=cfg.seed)
    if cfg.pattern is None:
        raise ConfigError(f"construct {cfg.target} needs a pattern")
    params = _pattern(cfg)
    chooser = choose_uniform if cfg.target == "theta" else choose_min
    return theta_stream(params, chooser=chooser, seed=cfg.seed, index=PatternIndex(params))


def run_construct(cfg: RunConfig) -> ResultTable:
    stream = construct_stream(cfg)
    table = ResultTable([("n", "int"), ("dstar", "exact"), ("ratio_min", "exact"),
                         ("ratio_max", "exact"), ("nidx_0", "exact")])
    for n in _checkpoints(cfg):
        lo, hi = _ratio_extremes(stream, n)
        table.add(n=n, dstar=star_discrepancy(stream.normalized(n)), ratio_min=lo, ratio_max=hi,
                  nidx_0=normality_index(stream, None, (0,), n))
    return table


RUNNERS = {"expand": run_expand, "probe": run_probe, "stats": run_stats,
           "moran": run_moran, "construct": run_construct}


def run(cfg: RunConfig) -> ResultTable:
    table = RUNNERS[cfg.command](cfg)
    table.header = [("version", __version__)] + config_items(cfg)
    return table


def render(table: ResultTable, cfg: RunConfig) -> str:
    return (to_jsonl if cfg.format == "jsonl" else to_csv)(table, raw=cfg.raw)


# -- argument parsing -------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override its entries")
    p.add_argument("--q", help="basic sequence: succ, pow2, log, const:<c>, list:<q1,...>")
    p.add_argument("--seed", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--n", type=int, help="single checkpoint (expand: number of digits)")
    p.add_argument("--checkpoints", help="comma-separated, strictly increasing")
    p.add_argument("--format", choices=("csv", "jsonl"))
    p.add_argument("--raw", action="store_const", const=True, help="print exact values as p/q")
    p.add_argument("--search-cap", dest="search_cap", type=int)
    p.add_argument("--out", help=f"output file (relative paths resolve under ${OUT_DIR_ENV} if set)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcantor", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="digits, partial sums and T-map values of a rational")
    _common(p)
    p.add_argument("--x", required=False)

    p = sub.add_parser("probe", help="finite-n values of divergence and pattern conditions")
    _common(p)
    p.add_argument("what", choices=COMMANDS["probe"])
    p.add_argument("--k", type=int)
    p.add_argument("--pattern", choices=("example1", "example2"))
    p.add_argument("--ell", type=int)

    p = sub.add_parser("stats", help="statistics of a digit stream or point sequence")
    _common(p)
    p.add_argument("--metric", choices=COMMANDS["stats"], required=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--source", choices=("weyl-golden", "weyl-alpha", "scaled-non-ud", "rational", "random"))
    src.add_argument("--weyl-golden", dest="source", action="store_const", const="weyl-golden")
    p.add_argument("--alpha", help="rational rotation for weyl-alpha")
    p.add_argument("--x")
    p.add_argument("--block")
    p.add_argument("--block2")
    p.add_argument("--set")
    p.add_argument("--m", type=int)

    p = sub.add_parser("moran", help="Feng-Wen-Wu bound tables and gamma sequences")
    _common(p)
    p.add_argument("--nk")
    p.add_argument("--ck")
    p.add_argument("--depth", type=int)
    p.add_argument("--pattern", choices=("example1", "example2"))
    p.add_argument("--ell", type=int)
    p.add_argument("--gamma", dest="target", action="store_const", const="gamma")
    p.add_argument("--on-empty", dest="on_empty", choices=("error", "clip"))

    p = sub.add_parser("construct", help="witness streams with per-checkpoint statistics")
    _common(p)
    p.add_argument("kind", choices=COMMANDS["construct"])
    p.add_argument("--source", choices=("weyl-golden", "weyl-alpha", "scaled-non-ud"))
    p.add_argument("--alpha")
    p.add_argument("--set")
    p.add_argument("--pattern", choices=("example1", "example2"))
    p.add_argument("--ell", type=int)
    p.add_argument("--on-empty", dest="on_empty", choices=("error", "clip"))
    return parser


_NOT_CONFIG = {"config", "out", "n", "what", "kind", "metric"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if ns.config:
        try:
            text = Path(ns.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc.strerror}") from None
        base = parse_config(text)
        values = {k: v for k, v in config_items(base)}
    args = {k: v for k, v in vars(ns).items() if v is not None and k not in _NOT_CONFIG}
    target = getattr(ns, "what", None) or getattr(ns, "kind", None) or getattr(ns, "metric", None)
    if target is not None:
        args["target"] = target
    if ns.command == "moran" and "target" not in args and "target" not in values:
        args["target"] = "fww"
    if getattr(ns, "n", None) is not None:
        # expand lists every digit up to n; elsewhere n is a single checkpoint
        if ns.command == "expand":
            args["horizon"] = ns.n
        elif "checkpoints" not in args:
            args["checkpoints"] = str(ns.n)
    if values.get("command", ns.command) != ns.command:
        raise ConfigError(f"config file is for {values['command']!r}, not {ns.command!r}")
    values.update(args)
    values["command"] = ns.command
    return make_config(values)


def _output_path(out: str) -> Path:
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        text = render(run(cfg), cfg)
    except QCantorError as exc:
        reason = str(exc).replace('"', "'")
        print(f'error: kind={exc.kind} code={exc.exit_code} reason="{reason}"', file=sys.stderr)
        return exc.exit_code
    if ns.out:
        _output_path(ns.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
