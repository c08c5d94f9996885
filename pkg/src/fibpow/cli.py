"""Command-line interface.

Commands: solve (all solutions for a fixed y), prove (the full theorem),
zeckendorf, bounds, and reduce (run one reduction primitive on explicit
inputs).  Progress goes to stderr, machine output to stdout or files.

Exit codes: 0 success, 1 refutation, 2 numeric failure, 64 usage error.
"""

from __future__ import annotations

import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import click

from .arbreal import CertifiedReal, PrecisionExhausted, log_rational
from .quadfield import ALPHA, SQRT5, tau, zeckendorf
from .reduction import (
    ReductionFailed,
    baker_davenport,
    build_kappa_list,
    continued_fraction,
    de_weger_reduce,
)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64

click.UsageError.exit_code = EXIT_USAGE


@dataclass
class RunConfig:
    command: str
    y: int | None = None
    n1_max: int = 470
    n_cap: int | None = None
    jobs: int = 1
    precision_bits: int = 3072
    out_path: str | None = None
    resume: bool = False
    format: str = "text"

    def __post_init__(self):
        if self.jobs < 1 or self.precision_bits < 256 or self.n1_max < 3:
            raise click.UsageError(
                "need jobs >= 1, precision-bits >= 256, n1-max >= 3"
            )


# -- tiny expression language for --mu/--tau/--eta --------------------------

_TOKEN = re.compile(r"\s*(log|sqrt|tau|alpha|\d+|[()/])")


def parse_log_expression(text: str, bits: int = 1600) -> CertifiedReal:
    """Evaluate expressions like "log(sqrt(5))/log(alpha)" or "log(2)/log(tau(3))".

    Grammar: expr := factor ("/" factor)*;  factor := "log" "(" atom ")";
    atom := "alpha" | "sqrt" "(" int ")" | "tau" "(" int ")" | int.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise click.UsageError(f"cannot parse expression at: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    tokens.reverse()  # pop() from the front

    def expect(tok):
        if not tokens or tokens.pop() != tok:
            raise click.UsageError(f"expected {tok!r} in expression {text!r}")

    def atom() -> CertifiedReal:
        if not tokens:
            raise click.UsageError(f"unexpected end of expression {text!r}")
        t = tokens.pop()
        if t == "alpha":
            return ALPHA.log_certified(bits)
        if t == "sqrt":
            expect("(")
            n = int(tokens.pop())
            expect(")")
            return log_rational(n, 1, bits) / 2
        if t == "tau":
            expect("(")
            n = int(tokens.pop())
            expect(")")
            return tau(n).log_certified(bits)
        if t.isdigit():
            return log_rational(int(t), 1, bits)
        raise click.UsageError(f"unexpected token {t!r} in {text!r}")

    def factor() -> CertifiedReal:
        expect("log")
        expect("(")
        v = atom()
        expect(")")
        return v

    value = factor()
    while tokens:
        expect("/")
        value = value / factor()
    return value


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# -- command group ----------------------------------------------------------


@click.group()
def main():
    """Certified solver for F_n + F_m = y^a."""


@main.command()
@click.argument("y", type=int)
@click.option("--n-cap", type=int, default=None, help="cap the search range for n")
@click.option("--precision-bits", type=int, default=3072)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="text")
def solve(y, n_cap, precision_bits, fmt):
    """List all solutions (n, m, a) of F_n + F_m = y^a for a fixed y >= 2."""
    from .pipeline import solve_for_y

    if y < 2:
        raise click.UsageError("y must be >= 2")
    try:
        solutions = solve_for_y(y, n_cap=n_cap, bits=precision_bits)
    except PrecisionExhausted as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)
    if fmt == "json":
        print(json.dumps([[s.n, s.m, s.a] for s in solutions]))
    elif fmt == "csv":
        print("n,m,a")
        for s in solutions:
            print(f"{s.n},{s.m},{s.a}")
    else:
        if not solutions:
            print("no solutions")
        for s in solutions:
            print(f"(n, m, a) = ({s.n}, {s.m}, {s.a})")


@main.command()
@click.option("--n1-max", type=int, default=470)
@click.option("--jobs", type=int, default=lambda: os.cpu_count() or 1)
@click.option("--precision-bits", type=int, default=3072)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--resume", is_flag=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="text")
def prove(n1_max, jobs, precision_bits, out_path, resume, fmt):
    """Verify the at-most-one-solution theorem over all candidate pairs."""
    from .pipeline import (
        EXPECTED_MULTI_Y,
        StageFailed,
        StepFailed,
        prove_theorem,
        write_solutions_csv,
    )

    jobs = jobs() if callable(jobs) else jobs
    RunConfig(
        "prove", n1_max=n1_max, jobs=jobs, precision_bits=precision_bits,
        out_path=out_path, resume=resume, format=fmt,
    )
    try:
        report = prove_theorem(
            n1_max=n1_max,
            jobs=jobs,
            bits=precision_bits,
            out_path=out_path,
            resume=resume,
            progress=_progress,
        )
    except (StageFailed, StepFailed, PrecisionExhausted, ReductionFailed) as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)

    multi = {int(y): sols for y, sols in report["multi_solution_y"].items()}
    if fmt == "json":
        print(json.dumps(report if out_path is None else report["multi_solution_y"]))
    elif fmt == "csv" and out_path:
        write_solutions_csv(report, out_path + ".solutions.csv")
        _progress(f"solutions CSV written to {out_path}.solutions.csv")
    else:
        print(f"instances: {report['totals']['instances']}")
        print(f"multi-solution y: {sorted(multi)}")
        for y in sorted(multi):
            pretty = ", ".join(f"({n}, {m}, {a})" for n, m, a in multi[y])
            print(f"  y={y}: {pretty}")
        if report["refutations"]:
            print(f"REFUTATION for y in {report['refutations']}")
    if report["refutations"]:
        sys.exit(EXIT_REFUTED)
    sys.exit(EXIT_OK)


@main.command("zeckendorf")
@click.argument("n", type=int)
def zeckendorf_cmd(n):
    """Print the Zeckendorf expansion of N as Fibonacci indices."""
    if n < 1:
        raise click.UsageError("N must be >= 1")
    digits = zeckendorf(n)
    print(" + ".join(f"F{d}" for d in reversed(digits)))


@main.command()
@click.argument("y", type=int)
def bounds(y):
    """Print the certified solution bounds for a fixed y."""
    from .linforms import bravo_luca_n_bound, gap_bound

    if y < 2:
        raise click.UsageError("y must be >= 2")
    try:
        n = bravo_luca_n_bound(y)
        g = gap_bound(y, n)
    except PrecisionExhausted as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)
    print(f"n <= {n}")
    print(f"n - m <= {g}")


@main.group()
def reduce():
    """Run one reduction primitive on explicit inputs."""


@reduce.command()
@click.option("--mu", required=True, help='e.g. "log(sqrt(5))/log(alpha)"')
@click.option("--count", type=int, required=True, help="number of convergents")
@click.option("--precision-bits", type=int, default=4096)
def cf(mu, count, precision_bits):
    """Continued-fraction expansion: convergents and largest partial quotient."""
    value = parse_log_expression(mu, precision_bits)
    try:
        table = continued_fraction(value, lambda l, q: l >= count)
    except PrecisionExhausted as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)
    p, q = table.convergents[count]
    print(f"q_{count} = {q}")
    print(f"p_{count} = {p}")
    print(f"A = max partial quotient a_1..a_{count} = {table.max_partial_quotient(count)}")


@reduce.command()
@click.option("--eta", "etas", multiple=True, required=True, help="repeated log expressions")
@click.option("--x", "xs", multiple=True, type=int, required=True, help="coefficient bounds X_i")
@click.option("--c3", type=float, required=True)
@click.option("--c4", type=float, required=True)
@click.option("--c-exp", type=int, default=200, help="lattice scale C = 10^c_exp")
@click.option("--precision-bits", type=int, default=2048)
def lll(etas, xs, c3, c4, c_exp, precision_bits):
    """Lattice bound for |x1 eta1 + ... + xk etak| < c3 exp(-c4 H)."""
    if len(etas) != len(xs):
        raise click.UsageError("need as many --x as --eta")
    vals = [parse_log_expression(e, precision_bits) for e in etas]
    c3v = CertifiedReal.from_fraction(Fraction(c3))
    c4v = CertifiedReal.from_fraction(Fraction(c4))
    try:
        out = de_weger_reduce(vals, None, list(xs), c3v, c4v, 10**c_exp)
    except (ReductionFailed, PrecisionExhausted) as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)
    print(f"H <= {out.h_bound}  (C = 10^{len(str(out.c_used)) - 1})")


@reduce.command()
@click.option("--mu", required=True)
@click.option("--tau", "tau_expr", required=True)
@click.option("--n", "n_max", type=int, required=True, help="range bound N")
@click.option("--c1", type=float, required=True)
@click.option("--c2", type=float, required=True)
@click.option("--pairs", type=int, default=40)
@click.option("--precision-bits", type=int, default=3072)
def bakdav(mu, tau_expr, n_max, c1, c2, pairs, precision_bits):
    """Baker-Davenport bound for |n mu + tau - x| < c1 exp(-c2 H), n < N."""
    mu_v = parse_log_expression(mu, precision_bits)
    tau_v = parse_log_expression(tau_expr, precision_bits)
    c1v = CertifiedReal.from_fraction(Fraction(c1))
    c2v = CertifiedReal.from_fraction(Fraction(c2))
    try:
        kp = build_kappa_list(mu_v, n_max, count=pairs)
        h = baker_davenport(mu_v, tau_v, n_max, c1v, c2v, kp)
    except PrecisionExhausted as exc:
        _progress(f"numeric failure: {exc}")
        sys.exit(EXIT_NUMERIC)
    if h is None:
        _progress("no kappa pair certified the bound")
        sys.exit(EXIT_NUMERIC)
    print(f"H <= {h}")


if __name__ == "__main__":
    main()
