"""Command-line entry point: ``approxalg <subcommand> --instance FILE``.

Exit status 0 on success, 1 when an analysis produces a failure finding
(validation findings, monotonicity or inclusion failures, a Violated verdict under
``--expect-approximable``), 2 on usage, parse or truncation errors.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .algebra import validate_model
from .diagnostics import (
    VIOLATED,
    approximability_verdict,
    condition3_table,
    default_schedule,
    growth_proxies,
    rank_ratio_check,
)
from .divisor import (
    analytic_bound,
    check_inclusion,
    check_monotonicity,
    coefficient_decay,
    divisibility_pairs,
    divisor_limit_estimate,
)
from .errors import ApproxAlgError, UnsupportedDimensionError, ValidationError
from .instance_file import instance_flag, load_instance, parse_flag, shipped_instance_path
from .okounkov import check_volume_identity, collect_semigroup, volume_sequence

OUT_ENV = "APPROXALG_OUT"
DEFAULT_OUT = "approxalg_out"
SUBCOMMANDS = ("validate", "ranks", "cond3", "okounkov", "divisor", "report")


def decimal_str(q) -> str:
    """12-significant-digit rendering of an exact rational."""
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = 12
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d, "f") if abs(d.adjusted()) < 12 else str(d)


def _pair(q):
    if q is None:
        return ["undefined", "undefined"]
    return [str(Fraction(q)), decimal_str(q)]


@dataclass
class RunConfig:
    subcommand: str
    instance: str
    out: Path
    M: int | None = None
    N: int = 16
    P: list | None = None
    epsilons: list | None = None
    window: int | None = None
    r: int = 1
    seed: int = 0
    samples: int = 16
    flag: str | None = None
    check_degrees: list | None = None
    expect_approximable: bool = False


@dataclass
class Outcome:
    status: int = 0
    summary: list = field(default_factory=list)

    def finding(self, line: str):
        self.status = max(self.status, 1)
        self.summary.append(f"FINDING: {line}")


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, header: list, rows):
        with open(self.out / name, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([str(c) for c in row])

    def text(self, name: str, lines: list):
        with open(self.out / name, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def resolve_instance(spec: str) -> Path:
    path = Path(spec)
    if path.exists():
        return path
    shipped = shipped_instance_path(Path(spec).stem)
    if shipped.exists():
        return shipped
    raise ApproxAlgError(f"instance file {spec} not found (and no shipped instance of that name)")


def _flag_for(model, cfg: RunConfig):
    if cfg.flag:
        return parse_flag(cfg.flag)
    return instance_flag(model)


# -- subcommands ----------------------------------------------------------------

def _validate(model, cfg, w: _Writer, out: Outcome):
    report = model.metadata.get("validation") or validate_model(model, cfg.samples, cfg.seed)
    w.text("validation.txt", report.lines())
    out.summary.append(f"[validate] {'pass' if report.ok else 'fail'}")
    for f in report.failures:
        out.finding(f"validation {f.check}: {f.message}")


def _ranks(model, cfg, w: _Writer, out: Outcome):
    M = cfg.M or 64
    seq = volume_sequence(model, M)
    w.csv("ranks.csv", ["m", "dim", "v_m", "v_m_decimal"],
          ([m, model.rank(m)] + _pair(v) for m, v in seq))
    rr = rank_ratio_check(model, cfg.r, M - cfg.r)
    w.csv("rank_ratios.csv", ["n", "r", "ratio", "ratio_decimal"],
          ([n, cfg.r] + _pair(q) for n, q in rr.ratios))
    gp = growth_proxies(model, M, cfg.window)
    lines = [f"model: {model.name}", f"M: {M}", f"r: {cfg.r}",
             f"rank_ratio_window: {rr.window[0]}..{rr.window[1]}",
             f"max_deviation: {_fmt(rr.max_deviation)} at n={rr.argmax}",
             f"infinite_ratio_witnesses: {rr.infinite_witnesses}",
             f"growth_window: {gp.window}",
             f"growth_liminf_proxy: {_fmt(gp.liminf)}",
             f"growth_limsup_proxy: {_fmt(gp.limsup)}",
             "note: both proxies of d! rk B_m / m^d are shown; neither reading of "
             "'does not converge to 0' is preferred"]
    w.text("ranks_summary.txt", lines)
    out.summary.append(f"[ranks] v_{M} = {_fmt(seq[-1][1])}; max |ratio - 1| = {_fmt(rr.max_deviation)}")


def _cond3(model, cfg, w: _Writer, out: Outcome):
    schedule = default_schedule(cfg.N, cfg.epsilons) if cfg.epsilons else default_schedule(cfg.N)
    P = cfg.P or sorted({p0 for _, p0, _ in schedule} | {3, 5, 7})
    P = [p for p in P if p * cfg.N <= model.truncation] if not cfg.P else P
    table = condition3_table(model, P, cfg.N)
    w.csv("cond3.csv", ["p", "n", "dim_power", "dim_piece", "ratio", "ratio_decimal"],
          ([e.p, e.n, e.power_dim, e.piece_dim] + _pair(e.ratio)
           for e in (table.entries[k] for k in sorted(table.entries))))
    verdict = approximability_verdict(model, schedule, table=table)
    w.text("verdict.txt", [f"model: {model.name}", f"P: {P}", f"N: {cfg.N}"] + verdict.lines())
    out.summary.append(f"[cond3] verdict {verdict.status}")
    if cfg.expect_approximable and verdict.status == VIOLATED:
        out.finding(f"verdict Violated with witness p={verdict.witness['p']}, "
                    f"bound {verdict.witness['bound']}")


def _okounkov(model, cfg, w: _Writer, out: Outcome):
    M = cfg.M or 32
    flag = _flag_for(model, cfg)
    sample = collect_semigroup(model, flag, M)
    d = model.dimension
    w.csv("semigroup.csv", ["m"] + [f"v{i + 1}" for i in range(d)],
          ([m] + list(v) for m, v in sample.points))
    w.csv("volume_sequence.csv", ["m", "dim", "v_m", "v_m_decimal"],
          ([m, model.rank(m)] + _pair(v) for m, v in volume_sequence(model, M)))
    try:
        report = check_volume_identity(model, flag, M, cfg.window)
    except UnsupportedDimensionError as exc:
        w.text("okounkov_summary.txt", [f"model: {model.name}", f"unsupported: {exc}"])
        out.summary.append(f"[okounkov] hull skipped: {exc}")
        return
    header = ["vertex"]
    for i in range(d):
        header += [f"x{i + 1}", f"x{i + 1}_decimal"]
    w.csv("body.csv", header,
          ([k] + [c for x in v for c in _pair(x)] for k, v in enumerate(report.body.vertices)))
    w.text("okounkov_summary.txt", report.lines())
    diff = _fmt(report.difference) if report.comparable else "not compared (hypotheses fail)"
    out.summary.append(f"[okounkov] d!vol = {report.normalized_body_volume}, v_M = {report.v_M}, "
                       f"difference {diff}")


def _divisor(model, cfg, w: _Writer, out: Outcome):
    M = cfg.M or 16
    est = divisor_limit_estimate(model, M)
    w.csv("divisors.csv", ["m", "prime", "coefficient", "normalized", "normalized_decimal"],
          ([m, c, d[c]] + _pair(Fraction(d[c], m))
           for m, d in sorted(est.divisors.items()) for c in d.support))
    w.csv("estimate.csv", ["prime", "sup", "sup_decimal", "argmax", "analytic_bound", "analytic_bound_decimal"],
          ([c] + _pair(est.records[c].sup) + [est.records[c].argmax]
           + (_pair(analytic_bound(model, c)) if analytic_bound(model, c) is not None else ["unknown", "unknown"])
           for c in est.primes))
    w.csv("divisibility.csv", ["prime", "m", "normalized", "normalized_decimal"],
          ([c, m] + _pair(q) for c in est.primes for m, q in est.divisibility[c]))
    mono = check_monotonicity(model, divisibility_pairs(M), observe_up_to=M)
    w.csv("monotonicity_observations.csv", ["m1", "m2", "prime", "lhs", "lhs_decimal", "rhs", "rhs_decimal"],
          ([m1, m2, c] + _pair(a) + _pair(b) for m1, m2, c, a, b in mono.observations))
    inc = check_inclusion(model, est, M, cfg.check_degrees)
    decay = coefficient_decay(est, model)
    w.csv("decay.csv", ["l", "count", "analytic_count"],
          ([l, decay.counts[l], decay.analytic_counts[l] if decay.analytic_counts else "unknown"]
           for l in sorted(decay.counts)))
    lines = [f"model: {model.name}", f"M: {M}",
             "estimate: " + (", ".join(f"{c}={est.records[c].sup}" for c in est.primes) or "empty"),
             f"monotonicity_pairs: {len(mono.checked)}", f"monotonicity_failures: {len(mono.failures)}",
             f"non_divisible_decreases_observed: {len(mono.observations)}",
             f"inclusion_degrees: {inc.degrees[0]}..{inc.degrees[-1]}" if inc.degrees else "inclusion_degrees: none",
             f"inclusion: {'pass' if inc.ok else 'fail'}"]
    lines += [f"inclusion_failure: m={m} prime={c} pole={k} allowed={a}" for m, c, k, a in inc.failures]
    lines += [f"note: {n}" for n in inc.notes + decay.notes]
    lines.append("note: sups are over m <= M; no claim about the limsup beyond the truncation")
    w.text("divisor_summary.txt", lines)
    out.summary.append(f"[divisor] estimate {len(est.primes)} primes; monotonicity "
                       f"{'pass' if mono.ok else 'fail'}; inclusion {'pass' if inc.ok else 'fail'}")
    for m1, m2, c, a, b in mono.failures:
        out.finding(f"D_{m1}/{m1} > D_{m2}/{m2} at {c}: {a} > {b}")
    for m, c, k, a in inc.failures:
        out.finding(f"inclusion fails at m={m}, prime {c}: pole {k} > {a}")


def _fmt(q):
    return "undefined" if q is None else f"{q} ({decimal_str(q)})"


HANDLERS = {"validate": _validate, "ranks": _ranks, "cond3": _cond3,
            "okounkov": _okounkov, "divisor": _divisor}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        model = load_instance(resolve_instance(cfg.instance), cfg.samples, cfg.seed)
        w = _Writer(Path(cfg.out))
        out = Outcome()
        steps = list(HANDLERS) if cfg.subcommand == "report" else [cfg.subcommand]
        for step in steps:
            HANDLERS[step](model, cfg, w, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        if exc.report is not None:
            print("\n".join(exc.report.lines()), file=stderr)
        return 2
    except (ApproxAlgError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    header = [f"instance: {model.name} ({model.kind}, d={model.dimension})"]
    w.text("summary.txt" if cfg.subcommand == "report" else f"{cfg.subcommand}_run.txt", header + out.summary)
    print("\n".join(header + out.summary), file=stdout)
    return out.status


def _int_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("values must be positive")
    return vals


def _frac_list(text):
    try:
        vals = [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")
    if not vals or any(not 0 < v < 1 for v in vals):
        raise argparse.ArgumentTypeError("epsilons must lie in (0, 1)")
    return vals


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxalg", description="Exact diagnostics for graded algebras.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", required=True, help="instance file, or the name of a shipped instance")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=_positive, default=16, help="closure samples during validation")
    for name, helptext in [("validate", "validate the instance"),
                           ("ranks", "volume sequence and rank ratios"),
                           ("cond3", "power-image ratio table and verdict"),
                           ("okounkov", "semigroup, body and volume identity"),
                           ("divisor", "D_m, limit estimate, monotonicity, inclusion, decay"),
                           ("report", "everything, into one directory")]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name in ("ranks", "okounkov", "divisor", "report"):
            p.add_argument("--M", type=_positive, default=None, help="degree bound")
            p.add_argument("--window", type=_positive, default=None)
        if name in ("ranks", "report"):
            p.add_argument("--r", type=_positive, default=1)
        if name in ("cond3", "report"):
            p.add_argument("--P", type=_int_list, default=None)
            p.add_argument("--N", type=_positive, default=16)
            p.add_argument("--eps", type=_frac_list, default=None)
            p.add_argument("--expect-approximable", action="store_true")
        if name in ("okounkov", "report"):
            p.add_argument("--flag", default=None, help="e.g. 'point(-1)' or 'coordinate((0,1),(0,0))'")
        if name in ("divisor", "report"):
            p.add_argument("--check-degrees", type=_int_list, default=None,
                           help="degrees for the inclusion check (default 1..M)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    cfg = RunConfig(args.subcommand, args.instance, Path(out), seed=args.seed, samples=args.samples)
    for key in ("M", "N", "P", "window", "r", "flag", "check_degrees", "expect_approximable"):
        if hasattr(args, key):
            setattr(cfg, key, getattr(args, key))
    if hasattr(args, "eps"):
        cfg.epsilons = args.eps
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
