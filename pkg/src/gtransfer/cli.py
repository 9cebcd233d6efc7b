"""Command-line experiment runner.

    gtransfer <kind> [--config FILE] [--out DIR] [--order N] [--trunc N]
                     [--sweep a,b,c] [--tolerance TOL]

``kind`` is one of orthocheck, gnorm, transfer, linearize, kernel, ratios.
The optional INI config has one section named after the experiment; keys
not listed in :data:`ALLOWED_KEYS` abort the run with the offending line
number before any computation.  Command-line flags override the config.

Every run writes to ``--out`` (default ``./gtransfer-out/<kind>``):

* ``summary.json``: config echo, checks, overall pass flag, wall-clock time;
* ``<table>.csv``: one row per sweep point (parameter, value, reference, error);
* ``<table>.dat``: whitespace-separated (x, y) columns for plotting.

Exit status: 0 when every check passes, 1 when any check fails, 2 on a
configuration error.
"""

import argparse
import configparser
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .gfunction import g_l2_norm, g_parts, g_ratio_report
from .measure import default_order, gauss_rule, integrate, measure_for
from .orthopoly import (
    FamilySpec,
    apply_operator,
    eigenvalue,
    eval_poly,
    eval_table,
    log_squared_norm,
)
from .spectral import expand, kernel
from .transference import (
    GAUSSIAN,
    LAGUERRE,
    g_norm_transfer_experiment,
    inner_product_limit_experiment,
    linearization_coeffs,
    norm_limit_experiment,
)

EIGEN_TOL = 1e-9

KINDS = ("orthocheck", "gnorm", "transfer", "linearize", "kernel", "ratios")

_FAMILY_KEYS = {"family", "alpha", "beta", "lam"}
ALLOWED_KEYS = {
    "orthocheck": _FAMILY_KEYS | {"nmax", "order", "tolerance"},
    "gnorm": _FAMILY_KEYS | {"corpus", "trunc", "order", "tolerance"},
    "transfer": {"direction", "alpha", "corpus", "quantity", "k", "sweep", "order", "trunc",
                 "tolerance"},
    "linearize": {"alpha", "beta", "m", "n", "order", "tolerance"},
    "kernel": {"alpha", "beta", "t", "grid", "tolerance"},
    "ratios": _FAMILY_KEYS | {"corpus", "p", "trunc", "order", "tolerance"},
}

CORPUS = {
    "one": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "x2": lambda x: x * x,
    "x3": lambda x: x ** 3,
    "cubic": lambda x: x ** 3 - 1.5 * x,
    "cos": np.cos,
    "sin": np.sin,
    "gauss": lambda x: np.exp(-0.5 * x * x),
    "exp_half": lambda x: np.exp(-0.5 * x),
    "exp_third": lambda x: np.exp(-x / 3.0),
}


class ConfigError(ValueError):
    """Bad configuration; the message carries ``file:line`` when known."""


@dataclass
class Check:
    name: str
    value: float
    reference: float
    error: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return {k: _jsonable(v) for k, v in self.__dict__.items()}


@dataclass
class Table:
    name: str
    rows: list = field(default_factory=list)  # (parameter, value, reference, error)
    plot: list = field(default_factory=list)  # (x, y)


@dataclass
class RunReport:
    kind: str
    config: dict
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    duration: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name, value, reference, error, tolerance, passed=None):
        if passed is None:
            passed = bool(error <= tolerance)
        self.checks.append(Check(name, float(value), float(reference), float(error),
                                 float(tolerance), bool(passed)))


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_KEY_LINE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_numbers(text):
    """Map (section, key) -> 1-based line number, and section -> line."""
    where, sections = {}, {}
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith(("#", ";")):
            continue
        m = _SECTION_LINE.match(line)
        if m:
            section = m.group(1).strip()
            sections.setdefault(section, lineno)
            continue
        m = _KEY_LINE.match(line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip().lower()), lineno)
    return where, sections


def load_config(path, kind):
    """Parse the INI file at ``path`` and return the section for ``kind`` as a dict."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        loc = f"{path}:{line}" if line else path
        raise ConfigError(f"{loc}: {exc.message if hasattr(exc, 'message') else exc}") from exc
    where, sections = _line_numbers(text)
    for sec in parser.sections():
        if sec not in KINDS:
            raise ConfigError(f"{path}:{sections.get(sec, '?')}: unknown section [{sec}]")
        for key in parser[sec]:
            if key not in ALLOWED_KEYS[sec]:
                raise ConfigError(f"{path}:{where.get((sec, key), '?')}: unknown key "
                                  f"'{key}' in [{sec}]")
    if kind not in parser:
        return {}, {}
    values = dict(parser[kind])
    lines = {k: where.get((kind, k)) for k in values}
    return values, lines


class Settings:
    """Typed access to the merged config with line-precise error messages."""

    def __init__(self, values, lines, path):
        self.values = values
        self.lines = lines
        self.path = path

    def _where(self, key):
        line = self.lines.get(key)
        if line is not None:
            return f"{self.path}:{line}"
        return f"--{key}"

    def _conv(self, key, default, conv, what):
        if key not in self.values or self.values[key] is None:
            return default
        raw = self.values[key]
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self._where(key)}: {key} must be {what}, got {raw!r}") from exc

    def float(self, key, default):
        return self._conv(key, default, float, "a number")

    def int(self, key, default):
        return self._conv(key, default, lambda v: int(str(v)), "an integer")

    def str(self, key, default):
        return self._conv(key, default, lambda v: str(v).strip().lower(), "a string")

    def floats(self, key, default):
        return self._conv(key, default, _parse_floats, "a comma-separated list of numbers")

    def names(self, key, default):
        return self._conv(key, default, _parse_names, "a comma-separated list of names")

    def fail(self, key, msg):
        raise ConfigError(f"{self._where(key)}: {msg}")


def _parse_floats(raw):
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    parts = [p.strip() for p in str(raw).split(",") if p.strip()]
    return [float(p) for p in parts]


def _parse_names(raw):
    if isinstance(raw, (list, tuple)):
        return list(raw)
    return [p.strip().lower() for p in str(raw).split(",") if p.strip()]


def _family(s):
    kind = s.str("family", "jacobi")
    try:
        if kind == "jacobi":
            return FamilySpec.jacobi(s.float("alpha", 0.0), s.float("beta", 0.0))
        if kind == "gegenbauer":
            return FamilySpec.gegenbauer(s.float("lam", 1.0))
        if kind == "hermite":
            return FamilySpec.hermite()
        if kind == "laguerre":
            return FamilySpec.laguerre(s.float("alpha", 0.0))
    except ValueError as exc:
        s.fail("family", str(exc))
    s.fail("family", f"unknown family {kind!r}")


def _corpus(s, default):
    names = s.names("corpus", default)
    for name in names:
        if name not in CORPUS:
            s.fail("corpus", f"unknown corpus function {name!r} (known: {', '.join(CORPUS)})")
    return names


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_orthocheck(s, report):
    fam = _family(s)
    nmax = s.int("nmax", 20)
    order = s.int("order", max(64, nmax + 16))
    tol = s.float("tolerance", 1e-10)
    rule = gauss_rule(measure_for(fam), order)
    table = eval_table(fam, nmax, rule.nodes)
    gram = (table * rule.weights[:, None]).T @ table
    h = np.exp([log_squared_norm(fam, n) for n in range(nmax + 1)])
    normalized = gram / np.sqrt(np.outer(h, h))
    ortho_err = float(np.max(np.abs(normalized - np.eye(nmax + 1))))
    report.check("orthogonality", ortho_err, 0.0, ortho_err, tol)

    tab = Table("norms")
    for n in range(nmax + 1):
        err = abs(gram[n, n] - h[n]) / h[n]
        tab.rows.append((n, gram[n, n], h[n], err))
        tab.plot.append((n, err))
    report.tables.append(tab)

    lo, hi = fam.domain
    interior = rule.nodes[(rule.nodes > lo) & (rule.nodes < hi)]
    pts = interior[np.linspace(0, interior.size - 1, min(50, interior.size)).astype(int)]
    eig_err = 0.0
    for n in range(min(nmax, 15) + 1):
        lhs = apply_operator(fam, n, pts)
        rhs = eigenvalue(fam, n) * eval_poly(fam, n, pts)
        scale = max(float(np.max(np.abs(rhs))), 1e-300)
        eig_err = max(eig_err, float(np.max(np.abs(lhs - rhs))) / scale if n else
                      float(np.max(np.abs(lhs))))
    report.check("eigenfunction", eig_err, 0.0, eig_err, EIGEN_TOL)


def run_gnorm(s, report):
    fam = _family(s)
    N = s.int("trunc", 32)
    order = s.int("order", default_order(N))
    tol = s.float("tolerance", 1e-8)
    names = _corpus(s, ["x", "x2", "cubic"])
    rule = gauss_rule(measure_for(fam), order)
    tab = Table("gnorm")
    for idx, name in enumerate(names):
        c = expand(CORPUS[name], fam, N, rule)
        closed = g_l2_norm(c) ** 2
        parts = g_parts(c, rule.nodes)
        quad = math.fsum(rule.weights * (parts.time_part + parts.space_part))
        err = abs(quad - closed)
        report.check(f"g_l2[{name}]", quad, closed, err, tol)
        tab.rows.append((idx, quad, closed, err))
        if idx == 0:
            tab.plot.extend(zip(rule.nodes, parts.g))
    report.tables.append(tab)


def run_transfer(s, report):
    direction = s.str("direction", GAUSSIAN)
    if direction not in (GAUSSIAN, LAGUERRE):
        s.fail("direction", f"direction must be gaussian or laguerre, got {direction!r}")
    alpha = s.float("alpha", 0.0)
    names = _corpus(s, ["x"])
    quantity = s.str("quantity", "norm")
    sweep = s.floats("sweep", [1e2, 1e3, 1e4, 1e5])
    order = s.int("order", 64)
    N = s.int("trunc", 64)
    k = s.int("k", 1)
    if any(v <= 0 for v in sweep):
        s.fail("sweep", "sweep values must be positive")
    if quantity not in ("norm", "inner", "gnorm"):
        s.fail("quantity", f"quantity must be norm, inner or gnorm, got {quantity!r}")
    # gnorm: bound on the final error; otherwise: bound on the fitted decay exponent
    tol = s.float("tolerance", 5e-3 if quantity == "gnorm" else -0.8)
    for name in names:
        f = CORPUS[name]
        if quantity == "norm":
            rep = norm_limit_experiment(f, direction, sweep, alpha, order, squared=True)
        elif quantity == "inner":
            rep = inner_product_limit_experiment(f, k, direction, sweep, alpha, order)
        else:
            rep = g_norm_transfer_experiment(f, direction, sweep, alpha, N)
        tab = Table(f"transfer_{quantity}_{name}")
        for row in rep.rows():
            tab.rows.append(row)
            tab.plot.append((row[0], row[3]))
        report.tables.append(tab)
        if not rep.errors:
            continue
        exact = all(e <= 1e-13 * max(1.0, abs(l)) for e, l in zip(rep.errors, rep.limits))
        if quantity == "gnorm":
            last = rep.errors[-1]
            report.check(f"final_error[{name}]", last, 0.0, last, tol)
        elif not exact and len(sweep) >= 2:
            report.check(f"decreasing[{name}]", float(rep.strictly_decreasing()), 1.0, 0.0, 0.0,
                         passed=rep.strictly_decreasing())
            slope = rep.exponent
            report.check(f"decay_exponent[{name}]", slope, tol, max(0.0, slope - tol), 0.0,
                         passed=bool(slope <= tol))
        elif exact:
            report.check(f"exact[{name}]", max(rep.errors), 0.0, max(rep.errors), 1e-13)


def run_linearize(s, report):
    alpha, beta = s.float("alpha", 0.0), s.float("beta", 0.0)
    m, n = s.int("m", 1), s.int("n", 1)
    tol = s.float("tolerance", 1e-10)
    try:
        row = linearization_coeffs(alpha, beta, m, n, s.int("order", None))
        swapped = linearization_coeffs(alpha, beta, n, m, s.int("order", None))
    except ValueError as exc:
        s.fail("order", str(exc))
    total = math.fsum(row.nu)
    report.check("sum_to_one", total, 1.0, abs(total - 1.0), tol)
    sym = float(np.max(np.abs(row.nu - swapped.nu)))
    report.check("symmetry", sym, 0.0, sym, tol)
    if alpha >= beta >= -0.5:
        low = float(np.min(row.nu))
        report.check("nonnegative", low, 0.0, max(0.0, -low), 1e-12)
    tab = Table("linearization")
    for i, v, w in zip(row.i, row.nu, swapped.nu):
        tab.rows.append((int(i), v, w, abs(v - w)))
        tab.plot.append((int(i), v))
    report.tables.append(tab)


def run_kernel(s, report):
    fam = FamilySpec.jacobi(s.float("alpha", 0.0), s.float("beta", 0.0))
    ts = s.floats("t", [0.1, 0.5, 1.0])
    grid = s.int("grid", 32)
    tol = s.float("tolerance", 1e-10)
    rule = gauss_rule(measure_for(fam), 64)
    xs = np.cos(np.pi * (np.arange(grid) + 0.5) / grid)[::-1]
    tab = Table("kernel")
    for t in ts:
        if t <= 0:
            s.fail("t", "kernel times must be positive")
        K = kernel(fam, t, xs[:, None], xs[None, :])
        low = float(K.min())
        report.check(f"positivity[t={t:g}]", low, 0.0, max(0.0, -low), tol)
        mass = np.array([integrate(lambda y: kernel(fam, t, x, y), rule) for x in xs])
        mass_err = float(np.max(np.abs(mass - 1.0)))
        report.check(f"mass[t={t:g}]", float(mass.mean()), 1.0, mass_err, tol)
        tab.rows.append((t, low, 1.0, mass_err))
        tab.plot.extend((float(x), float(v)) for x, v in zip(xs, K[grid // 2]))
    report.tables.append(tab)


def run_ratios(s, report):
    fam = _family(s)
    N = s.int("trunc", 32)
    order = s.int("order", default_order(N))
    ps = s.floats("p", [1.5, 2.0, 4.0])
    tol = s.float("tolerance", 1e-2)
    names = _corpus(s, ["x", "cubic", "cos"])
    corpus = {name: CORPUS[name] for name in names}
    base = g_ratio_report(corpus, fam, ps, N, order)
    fine = g_ratio_report(corpus, fam, ps, 2 * N, 2 * order)
    tab = Table("ratios")
    for p in ps:
        a, b = base["max_ratio"][float(p)], fine["max_ratio"][float(p)]
        change = abs(b - a) / b if b else abs(b - a)
        report.check(f"ratio_stable[p={p:g}]", b, a, change, tol)
        tab.rows.append((p, b, a, change))
        tab.plot.append((p, b))
    report.tables.append(tab)


RUNNERS = {
    "orthocheck": run_orthocheck,
    "gnorm": run_gnorm,
    "transfer": run_transfer,
    "linearize": run_linearize,
    "kernel": run_kernel,
    "ratios": run_ratios,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v):
    return f"{float(v):.16e}"


def emit(report, out_dir):
    """Write summary.json plus one CSV and one .dat file per table."""
    os.makedirs(out_dir, exist_ok=True)
    for tab in report.tables:
        with open(os.path.join(out_dir, f"{tab.name}.csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("parameter,value,reference,error\n")
            for row in tab.rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        with open(os.path.join(out_dir, f"{tab.name}.dat"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("# x y\n")
            for x, y in tab.plot:
                fh.write(f"{_fmt(x)} {_fmt(y)}\n")
    summary = {
        "version": __version__,
        "kind": report.kind,
        "config": {k: _jsonable(v) for k, v in sorted(report.config.items())},
        "passed": report.passed,
        "checks": [c.as_dict() for c in report.checks],
        "tables": [t.name for t in report.tables],
        "wall_clock_seconds": report.duration,
    }
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False)
        fh.write("\n")


def run(kind, values, lines=None, path=None):
    """Run one experiment from a merged settings dict; returns a RunReport."""
    if kind not in RUNNERS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    settings = Settings(values, lines or {}, path)
    report = RunReport(kind, dict(values))
    start = time.perf_counter()
    RUNNERS[kind](settings, report)
    report.duration = time.perf_counter() - start
    return report


def build_parser():
    parser = argparse.ArgumentParser(prog="gtransfer", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", help="INI file with a [%s] section" % kind)
        p.add_argument("--out", help="output directory")
        p.add_argument("--order", type=int, help="quadrature order")
        p.add_argument("--trunc", type=int, help="spectral truncation N")
        p.add_argument("--sweep", help="comma-separated sweep values")
        p.add_argument("--tolerance", type=float, help="override the check tolerance")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        values, lines = ({}, {})
        if args.config:
            values, lines = load_config(args.config, args.kind)
        for key in ("order", "trunc", "sweep", "tolerance"):
            val = getattr(args, key)
            if val is not None:
                if key not in ALLOWED_KEYS[args.kind]:
                    raise ConfigError(f"--{key}: not used by the {args.kind} experiment")
                values[key] = val
                lines.pop(key, None)
        report = run(args.kind, values, lines, args.config)
    except ConfigError as exc:
        print(f"gtransfer: config error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out or os.path.join("gtransfer-out", args.kind)
    emit(report, out_dir)
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: value={c.value:.6e} reference={c.reference:.6e} "
              f"error={c.error:.3e} tol={c.tolerance:.1e}")
    print(f"{'PASS' if report.passed else 'FAIL'} {args.kind} ({len(report.checks)} checks, "
          f"{report.duration:.2f}s) -> {out_dir}")
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
