"""Command-line entry point.

Subcommands::

    fracorlicz young inspect     --young double_phase --q 2 --p 3
    fracorlicz kernel check      --kernel fractional --s 0.5 --dim 1 --p-minus 2
    fracorlicz rearrange         --input u.csv
    fracorlicz seminorm          --domain "box(0,1)" --input u.csv --young tp --p 2 --s 0.5
    fracorlicz counterexample    --domain "box(0,1)+box(2,4)" --young tp --p 2 --s 0.5
    fracorlicz compare           --domain "box(0,1)" --young tp --p 2 --s 0.75
    fracorlicz classify          --young tp --p 2 --s 0.75 --case 1

Every option may also come from a ``key = value`` file given with
``--config``; flags on the command line win.  Outputs go to ``--out``
(``report.csv``, ``report.txt``, ``curves.csv``).

Exit codes: 0 success, 1 configuration error, 2 no passing epsilon,
3 inconclusive classification, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import (
    CaseHypothesisFails,
    FracOrliczError,
    Inconclusive,
    MaximizerDiverged,
    NonIntegrableSingularity,
    NonYoung,
    OnBoundary,
    TooCoarse,
)
from .geometry import Domain, GridFunction, Lattice, schwarz_rearrange
from .quadrature import CubatureSpec
from .seminorm import SeminormRequest, evaluate
from .theorems import DEFAULT_EPS, verify_comparison, verify_counterexample
from .young import (
    DEFAULT_T_GRID,
    KernelSpec,
    beta,
    classify_theorem2_case,
    complementary,
    default_probe,
    delta2_constant,
    exponent_bounds,
    from_table,
    kernel_conditions_check,
    make_young,
)

log = logging.getLogger("fracorlicz")

EXIT_OK, EXIT_CONFIG, EXIT_NOPASS, EXIT_INCONCLUSIVE, EXIT_NUMERIC = 0, 1, 2, 3, 4

# value defaults applied after merging the config file and the command line
DEFAULTS = {
    "young": "tp",
    "p": None,
    "q": None,
    "scale": None,
    "young_table": None,
    "s": 0.5,
    "dim": None,
    "kernel": "fractional",
    "p_minus": None,
    "resolution": None,
    "levels": 2,
    "diag_depth": None,
    "truncation_radius": None,
    "tolerance": 1e-3,
    "threads": 1,
    "out": "out",
    "eps": None,
    "threshold": 3.0,
    "case": 1,
    "region": "domain",
    "input": None,
    "corpus": None,
    "domain": None,
    "ball_case": None,
}

COMMANDS = ("young inspect", "kernel check", "rearrange", "seminorm", "counterexample", "compare", "classify")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        exc = ConfigError(message)
        exc.usage_shown = True
        raise exc


# --------------------------------------------------------------------------
# argument handling


def _shared(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--out", default=S, help="output directory (default: out)")
    p.add_argument("--domain", default=S, help='e.g. "box(0,1)+box(2,4)" or "ball(0,0,1)"')
    p.add_argument("--young", default=S, help="catalog name: tp, power, log_power, log_damped, double_phase")
    p.add_argument("--young-table", default=S, help="two-column CSV of (t, G(t)) for a custom G")
    p.add_argument("--p", type=float, default=S)
    p.add_argument("--q", type=float, default=S)
    p.add_argument("--scale", type=float, default=S)
    p.add_argument("--s", type=float, default=S, help="fractional order in (0, 1)")
    p.add_argument("--dim", type=int, default=S)
    p.add_argument("--resolution", type=int, default=S, help="base cells along the longest side")
    p.add_argument("--levels", type=int, default=S, help="refinement levels (>= 1)")
    p.add_argument("--diag-depth", type=int, default=S, help="dyadic near-diagonal splits (>= 2)")
    p.add_argument("--truncation-radius", type=float, default=S)
    p.add_argument("--tolerance", type=float, default=S)
    p.add_argument("--threads", type=int, default=S, help="worker cap (results do not depend on it)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="fracorlicz", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    young = sub.add_parser("young", help="Young-function tools")
    ysub = young.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _shared(ysub.add_parser("inspect", help="exponents, doubling constant, complementary samples"))

    kernel = sub.add_parser("kernel", help="kernel condition checks")
    ksub = kernel.add_subparsers(dest="action", required=True, parser_class=_Parser)
    kc = ksub.add_parser("check", help="monotonicity, lower bound and integrability of (M, N)")
    _shared(kc)
    kc.add_argument("--kernel", default=S, help="fractional, unit_M or linear_M")
    kc.add_argument("--p-minus", type=float, default=S)

    r = sub.add_parser("rearrange", help="Schwarz-symmetrize a grid function CSV")
    _shared(r)
    r.add_argument("--input", default=S, help="grid function CSV (cell_index, x1..xN, value)")

    sm = sub.add_parser("seminorm", help="evaluate a seminorm of a grid function")
    _shared(sm)
    sm.add_argument("--input", default=S)
    sm.add_argument("--region", choices=["domain", "fullspace", "cross"], default=S)

    ce = sub.add_parser("counterexample", help="scan eps for the strict domain inequality")
    _shared(ce)
    ce.add_argument("--eps", default=S, help="comma-separated eps values (default 1/2..1/64)")
    ce.add_argument("--threshold", type=float, default=S)
    ce.add_argument("--ball-case", choices=["auto", "yes", "no"], default=S)

    cp = sub.add_parser("compare", help="empirical comparison ratios over a corpus")
    _shared(cp)
    cp.add_argument("--case", type=int, default=S)
    cp.add_argument("--corpus", default=S, help="comma-separated grid CSVs (default: built-in corpus)")

    cl = sub.add_parser("classify", help="decide a growth case from beta")
    _shared(cl)
    cl.add_argument("--case", type=int, default=S)
    return parser


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys may use dashes."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("-", "_")
        if k == "piece":
            out["domain"] = (out["domain"] + "+" if "domain" in out else "") + v.strip("\"'")
            continue
        out[k] = v.strip("\"'")
    return out


_FLOATS = {"p", "q", "scale", "s", "p_minus", "truncation_radius", "tolerance", "threshold"}
_INTS = {"dim", "resolution", "levels", "diag_depth", "threads", "case"}


def merge_config(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    given = {k: v for k, v in vars(ns).items() if k not in ("config", "verbose")}
    if ns.config:
        for k, v in read_config(ns.config).items():
            if k not in DEFAULTS and k not in ("command", "action"):
                raise ConfigError(f"unknown config key {k!r}")
            try:
                cfg[k] = float(v) if k in _FLOATS else int(v) if k in _INTS else v
            except ValueError as exc:
                raise ConfigError(f"bad value for {k}: {v!r}") from exc
    cfg.update(given)
    cfg["command"] = ns.command + (f" {ns.action}" if getattr(ns, "action", None) else "")
    return cfg


def young_from(cfg):
    if cfg.get("young_table"):
        data = np.loadtxt(cfg["young_table"], delimiter=",", ndmin=2, comments="#")
        return from_table(data[:, 0], data[:, 1], name=Path(cfg["young_table"]).stem)
    params = {k: cfg[k] for k in ("p", "q", "scale") if cfg.get(k) is not None}
    return make_young(cfg["young"], **params)


def domain_from(cfg) -> Domain:
    if not cfg.get("domain"):
        raise ConfigError("a domain is required (--domain or 'piece = ...' in the config)")
    try:
        return Domain.parse(cfg["domain"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def spec_from(cfg, default_resolution: int) -> CubatureSpec:
    try:
        return CubatureSpec(
            base_resolution=int(cfg["resolution"] or default_resolution),
            refinement_levels=int(cfg["levels"]),
            diagonal_split_depth=cfg["diag_depth"],
            truncation_radius=cfg["truncation_radius"],
            tolerance=float(cfg["tolerance"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def emit_curves(series: Sequence[Sequence], path, header: Sequence[str]) -> Path:
    """Write ``series`` (rows of numbers) as CSV with 17 significant digits."""
    rows = [list(r) for r in series]
    if not rows:
        raise ValueError("empty series")
    width = len(header)
    if any(len(r) != width for r in rows):
        raise ValueError("every row must have one entry per header column")
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(x) for x in r])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_csv(path, header, rows):
    emit_curves(rows, path, header)


def config_header(cfg) -> list[str]:
    return [f"{k} = {_fmt(cfg[k])}" for k in sorted(cfg) if cfg[k] is not None]


def write_summary(out: Path, cfg, body: str):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    text = "\n".join([f"# fracorlicz {__version__}  {stamp}", *("# " + h for h in config_header(cfg)), "", body, ""])
    (out / "report.txt").write_text(text)
    print(body)


# --------------------------------------------------------------------------
# commands


def cmd_young_inspect(cfg, out: Path) -> int:
    Y = young_from(cfg)
    pm, pp = exponent_bounds(Y, DEFAULT_T_GRID)
    d2 = delta2_constant(Y, DEFAULT_T_GRID)
    ts = np.geomspace(1e-3, 1e3, 13)
    rows = [(t, float(Y(t)), float(Y.g(t)), complementary(Y, float(t))) for t in ts]
    write_csv(out / "report.csv", ["name", "p_minus_declared", "p_plus_declared", "p_minus", "p_plus", "delta2"],
              [[Y.name, Y.p_minus, Y.p_plus, pm, pp, d2]])
    emit_curves(rows, out / "curves.csv", ["t", "G", "g", "G_complementary"])
    write_summary(out, cfg, "\n".join([
        f"young      {Y.name}",
        f"p_minus    {pm:.6g} (declared {Y.p_minus:.6g})",
        f"p_plus     {pp:.6g} (declared {Y.p_plus:.6g})",
        f"delta2     {d2:.6g} (bound 2^p_plus = {2 ** Y.p_plus:.6g})",
    ]))
    return EXIT_OK


KERNELS = {
    "fractional": lambda s, dim: KernelSpec.fractional_kernel(s, dim),
    "unit_M": lambda s, dim: KernelSpec(lambda r: np.ones_like(np.asarray(r, float)),
                                        lambda r: np.asarray(r, float) ** dim, name="M=1"),
    "linear_M": lambda s, dim: KernelSpec(lambda r: np.asarray(r, float),
                                          lambda r: np.asarray(r, float) ** dim, name="M=t"),
}


def cmd_kernel_check(cfg, out: Path) -> int:
    dim = int(cfg["dim"] or 1)
    try:
        K = KERNELS[cfg["kernel"]](float(cfg["s"]), dim)
    except KeyError:
        raise ConfigError(f"unknown kernel {cfg['kernel']!r}; choose from {sorted(KERNELS)}")
    pm = float(cfg["p_minus"]) if cfg["p_minus"] is not None else young_from(cfg).p_minus
    rep = kernel_conditions_check(K, pm, dim)
    write_csv(out / "report.csv", ["kernel", "m1", "m2", "m3", "head_integral", "tail_integral"],
              [[K.name, rep.m1, rep.m2, rep.m3, rep.head_integral, rep.tail_integral]])
    write_summary(out, cfg, "\n".join([
        f"kernel  {K.name}  p_minus={pm:g}  N={dim}",
        f"m1 {rep.m1}  m2 {rep.m2}  m3 {rep.m3}",
        f"integrals  head={rep.head_integral:.6g}  tail={rep.tail_integral:.6g}",
        *rep.notes,
    ]))
    return EXIT_OK


def _load_grid(path, domain=None) -> GridFunction:
    if not path:
        raise ConfigError("--input grid CSV is required")
    if not os.path.exists(path):
        raise ConfigError(f"input file {path} does not exist")
    return GridFunction.from_csv(path, domain)


def cmd_rearrange(cfg, out: Path) -> int:
    dom = Domain.parse(cfg["domain"]) if cfg.get("domain") else None
    u = _load_grid(cfg["input"], dom)
    v = schwarz_rearrange(u)
    v.to_csv(out / "rearranged.csv")
    write_csv(out / "report.csv", ["cells_in", "cells_out", "positive_cells", "max_value"],
              [[int(np.prod(u.shape)), int(np.prod(v.shape)), int(np.count_nonzero(u.values)), float(u.values.max())]])
    write_summary(out, cfg, f"rearranged {np.count_nonzero(u.values)} positive cells onto {v.shape}")
    return EXIT_OK


def cmd_seminorm(cfg, out: Path) -> int:
    D = domain_from(cfg)
    u = _load_grid(cfg["input"], D)
    Y = young_from(cfg)
    spec = spec_from(cfg, max(u.shape))
    req = SeminormRequest(u, Y, KernelSpec.fractional_kernel(float(cfg["s"]), D.dim), D, cfg["region"], spec)
    est = evaluate(req)
    R = est.metadata.get("R_t")
    write_csv(out / "report.csv", ["value", "error_bound", "resolution", "R_t"],
              [[est.value, est.error_bound, max(u.shape), R if R is not None else ""]])
    write_summary(out, cfg, f"{cfg['region']} seminorm = {est.value:.10g} +- {est.error_bound:.3g}")
    return EXIT_OK


def _eps_list(cfg):
    if not cfg.get("eps"):
        return list(DEFAULT_EPS)
    try:
        return [float(eval_fraction(e)) for e in str(cfg["eps"]).split(",") if e.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad eps list: {cfg['eps']!r}") from exc


def eval_fraction(text: str) -> float:
    text = text.strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


def cmd_counterexample(cfg, out: Path) -> int:
    D = domain_from(cfg)
    Y = young_from(cfg)
    ball = {"yes": True, "no": False}.get(str(cfg.get("ball_case") or "auto"))
    # 2D ball-case bumps are half the size of inscribed-ball bumps
    ball_2d = D.dim == 2 and D.is_single_ball and ball is not False
    spec = spec_from(cfg, 512 if D.dim == 1 else 64 if ball_2d else 48)
    rep = verify_counterexample(D, Y, float(cfg["s"]), _eps_list(cfg), spec, ball, float(cfg["threshold"]))
    header = ["eps", "lhs", "lhs_error", "rhs", "rhs_error", "margin", "combined_error", "verdict",
              "cross", "cross_star", "residual", "residual_bound", "fullspace", "fullspace_star", "support_cells"]
    rows = [[r.eps, r.lhs.value, r.lhs.error_bound, r.rhs.value, r.rhs.error_bound, r.margin, r.combined_error,
             "PASS" if r.verdict else "no", r.cross.value, r.cross_star.value, r.residual, r.residual_bound,
             r.fullspace.value, r.fullspace_star.value, r.support_cells] for r in rep.rows]
    write_csv(out / "report.csv", header, rows)
    emit_curves([[r.eps, r.lhs.value, r.rhs.value, r.margin] for r in rep.rows], out / "curves.csv",
                ["eps", "lhs", "rhs", "margin"])
    write_summary(out, cfg, rep.summary())
    return EXIT_OK if rep.passed else EXIT_NOPASS


def default_corpus(D: Domain, n: int = 10, seed: int = 0):
    """Off-center cone hats and squared tents inside the bounding box of ``D``."""
    lo, hi = D.bounding_box()
    span = float(np.min(hi - lo))
    rng = np.random.default_rng(seed)
    out, names = [], []
    for k in range(n):
        c = lo + (hi - lo) * rng.uniform(0.35, 0.65, size=D.dim)
        w = span * rng.uniform(0.1, 0.25)
        height = rng.uniform(0.5, 2.0)
        if k % 2 == 0:
            f = lambda X, c=c, w=w, a=height: a * np.maximum(0.0, 1.0 - np.linalg.norm(X - c, axis=-1) / w)
            names.append(f"hat{k}")
        else:
            f = lambda X, c=c, w=w, a=height: a * np.maximum(0.0, 1.0 - np.max(np.abs(X - c), axis=-1) / w) ** 2
            names.append(f"tent{k}")
        out.append(f)
    return out, names


def cmd_compare(cfg, out: Path) -> int:
    D = domain_from(cfg)
    Y = young_from(cfg)
    spec = spec_from(cfg, 128 if D.dim == 1 else 24)
    if cfg.get("corpus"):
        corpus = [_load_grid(p.strip(), D) for p in str(cfg["corpus"]).split(",") if p.strip()]
        names = [Path(p.strip()).stem for p in str(cfg["corpus"]).split(",") if p.strip()]
    else:
        corpus, names = default_corpus(D)
    rep = verify_comparison(D, Y, float(cfg["s"]), corpus, spec, int(cfg["case"]), names)
    write_csv(out / "report.csv",
              ["name", "domain", "domain_error", "fullspace", "fullspace_star", "cross", "rho", "polya_szego_ok"],
              [[r.name, r.domain.value, r.domain.error_bound, r.fullspace.value, r.fullspace_star.value,
                r.cross.value, r.rho, r.polya_szego_ok] for r in rep.rows])
    emit_curves([[k, r.rho] for k, r in enumerate(rep.rows)], out / "curves.csv", ["index", "rho"])
    write_summary(out, cfg, rep.summary())
    return EXIT_OK if rep.all_finite and rep.chain_ok else EXIT_NUMERIC


def cmd_classify(cfg, out: Path) -> int:
    Y = young_from(cfg)
    s = float(cfg["s"])
    dim = int(cfg["dim"] or 1)
    case = int(cfg["case"])
    lam = np.concatenate([default_probe("zero")[::-1], default_probe("inf")[1:]])
    curve = [(l, beta(Y, s, l)) for l in lam]
    emit_curves(curve, out / "curves.csv", ["lambda", "beta"])
    try:
        ok = classify_theorem2_case(Y, s, dim, case)
    except Inconclusive as exc:
        write_csv(out / "report.csv", ["young", "s", "dim", "case", "holds"], [[Y.name, s, dim, case, "inconclusive"]])
        write_summary(out, cfg, f"case {case}: Inconclusive ({exc})")
        return EXIT_INCONCLUSIVE
    write_csv(out / "report.csv", ["young", "s", "dim", "case", "holds"], [[Y.name, s, dim, case, ok]])
    write_summary(out, cfg, f"case {case} for {Y.name}, s={s:g}, N={dim}: {'holds' if ok else 'fails'}")
    return EXIT_OK


DISPATCH = {
    "young inspect": cmd_young_inspect,
    "kernel check": cmd_kernel_check,
    "rearrange": cmd_rearrange,
    "seminorm": cmd_seminorm,
    "counterexample": cmd_counterexample,
    "compare": cmd_compare,
    "classify": cmd_classify,
}


def run(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return DISPATCH[cfg["command"]](cfg, out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.ERROR, format="%(levelname)s %(message)s")
        cfg = merge_config(ns)
        return run(cfg)
    except ConfigError as exc:
        if not getattr(exc, "usage_shown", False):
            parser.print_usage(sys.stderr)
        print(f"fracorlicz: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, NonYoung) as exc:
        print(f"fracorlicz: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Inconclusive, CaseHypothesisFails) as exc:
        print(f"fracorlicz: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (NonIntegrableSingularity, MaximizerDiverged, OnBoundary, TooCoarse, FracOrliczError,
            FloatingPointError, ArithmeticError) as exc:
        print(f"fracorlicz: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
