"""Command-line front end: verify schemes, compute bounds, exact and Monte-Carlo runs."""

from __future__ import annotations

import csv
import io
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import click

from . import physbm
from .codes import CodeError, StabilizerCode, build_code, code_from_text
from .engine import (
    DEFAULT_CAP,
    DEFAULT_SEED,
    CapExceeded,
    exact_adaptive,
    exact_success_probability,
    flat_static_probability,
    monte_carlo,
)
from .schemes import (
    Scheme,
    SchemeError,
    StaticScheme,
    build_optimal,
    build_static,
    derive_generator_sequence,
    scheme_from_text,
)
from .verify import bound, check_view, heuristic_no_almost_stabilizer, heuristic_no_premature_logical

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
FORMATS = ("text", "csv", "json")
FAMILIES = ("qpc", "five-qubit", "steane", "standard", "rotated", "tree")
SCHEME_KINDS = ("optimal", "static-simple", "static-optimized", "static-tree", "static-string")
BIG_SIMPLE_DIM = 4  # largest d for the simple static enumeration without --big

_RATIONAL = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_pb(text: str) -> Fraction:
    """P_B as an exact rational "p/q"; floats are refused."""
    m = _RATIONAL.match(text)
    if not m:
        raise ValueError(f"P_B must be a rational 'p/q', got {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ValueError("P_B denominator is zero")
    value = Fraction(num, den)
    if not 0 <= value <= 1:
        raise ValueError(f"P_B = {value} outside [0, 1]")
    return value


class _PbType(click.ParamType):
    name = "p/q"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_pb(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


PB = _PbType()


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    params: tuple[int, ...] = ()
    scheme: str = "optimal"
    scheme_file: Path | None = None
    code_file: Path | None = None
    p_b: Fraction = Fraction(1, 2)
    trials: int = 100_000
    seed: int = DEFAULT_SEED
    output: Path | None = None
    fmt: str = "text"
    workers: int = 1
    cap: int = DEFAULT_CAP
    timing: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


# scheme resolution ------------------------------------------------------------


def _params(family: str, r: int | None, m: int | None, branching: str | None) -> tuple[int, ...]:
    if family in ("qpc", "standard", "rotated"):
        if r is None or m is None:
            raise click.UsageError(f"--r and --m are required for {family}")
        return (r, m)
    if family == "tree":
        if not branching:
            raise click.UsageError("--branching is required for tree")
        try:
            return tuple(int(b) for b in branching.split(","))
        except ValueError:
            raise click.UsageError(f"bad --branching {branching!r}") from None
    return ()


def resolve_code(cfg: RunConfig) -> StabilizerCode | None:
    if cfg.code_file is not None:
        return code_from_text(cfg.code_file.read_text())
    if cfg.family is None:
        return None
    return build_code(cfg.family, cfg.params)


def resolve_scheme(cfg: RunConfig) -> tuple[Scheme | StaticScheme, tuple | None]:
    """Scheme plus its parent-code generator sequence when one is known."""
    code = resolve_code(cfg)
    if cfg.scheme_file is not None:
        return scheme_from_text(cfg.scheme_file.read_text(), code), None
    if code is None:
        raise click.UsageError("give --code or --scheme-file")
    if cfg.scheme == "optimal":
        if cfg.code_file is not None:
            raise click.UsageError("built-in optimal schemes need a built-in --code")
        return build_optimal(code.family, code.params)
    return build_static(cfg.scheme, code, code.params), None


# output ---------------------------------------------------------------------------


def emit(rows: Sequence[dict], cfg: RunConfig, text: str | None = None) -> None:
    if cfg.fmt == "json":
        out = json.dumps(list(rows), indent=2) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        out = buf.getvalue()
    else:
        out = text if text is not None else "\n".join(
            "  ".join(f"{k}={v}" for k, v in row.items()) for row in rows
        ) + "\n"
    if cfg.output is not None:
        cfg.output.write_text(out)
    else:
        click.echo(out, nl=False)


def _frac(v: Fraction | None) -> str:
    return "" if v is None else str(v)


def result_row(
    scheme: Scheme | StaticScheme,
    cfg: RunConfig,
    exact: Fraction | None,
    mc=None,
    wall: float | None = None,
) -> dict:
    code = scheme.code
    row = {
        "scheme": scheme.name or "custom",
        "code": code.family,
        "params": ",".join(map(str, code.params)),
        "pb": str(cfg.p_b),
        "exact": _frac(exact),
        "exact_num": "" if exact is None else exact.numerator,
        "exact_den": "" if exact is None else exact.denominator,
        "mc_estimate": "" if mc is None else f"{mc.estimate:.6f}",
        "stderr": "" if mc is None else f"{mc.stderr:.6f}",
        "trials": "" if mc is None else mc.trials,
        "seed": "" if mc is None else mc.seed,
    }
    if cfg.timing:
        row["wall_time"] = f"{wall:.3f}" if wall is not None else ""
    return row


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CapExceeded as exc:
        _fail(EXIT_CAP, f"{exc}; shrink the code or raise --cap (exact cost doubles per attempted BM)")
    except (SchemeError, CodeError, OSError) as exc:
        _fail(EXIT_USAGE, f"error: {exc}")


# commands -------------------------------------------------------------------------


def _scheme_options(f):
    f = click.option("--code", "family", type=click.Choice(FAMILIES), help="Built-in code family.")(f)
    f = click.option("--r", type=int, help="Rows (qpc, standard, rotated).")(f)
    f = click.option("--m", type=int, help="Columns (qpc, standard, rotated).")(f)
    f = click.option("--branching", help="Tree branching factors, e.g. 2,2,2.")(f)
    f = click.option("--scheme", type=click.Choice(SCHEME_KINDS), default="optimal", show_default=True)(f)
    f = click.option("--scheme-file", type=click.Path(exists=True, dir_okay=False, path_type=Path))(f)
    f = click.option("--code-file", type=click.Path(exists=True, dir_okay=False, path_type=Path))(f)
    return f


def _common_options(f):
    f = click.option("--pb", type=PB, default="1/2", show_default=True, help="Physical BM success probability p/q.")(f)
    f = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)(f)
    f = click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="Write to a file.")(f)
    f = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)(f)
    return f


def _config(command: str, family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers, **extra):
    params = _params(family, r, m, branching) if family else ()
    return RunConfig(
        command,
        family,
        params,
        scheme,
        scheme_file,
        code_file,
        pb,
        fmt=fmt,
        output=output,
        workers=workers,
        **extra,
    )


@click.group()
def main() -> None:
    """Logical Bell measurement schemes on stabilizer codes."""


@main.command()
@_scheme_options
@_common_options
def verify(family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers):
    """Check the optimality conditions of a feedforward scheme."""
    cfg = _config("verify", family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers)
    sch, seq = _guard(resolve_scheme, cfg)
    if not isinstance(sch, Scheme):
        raise click.UsageError("verify needs a feedforward scheme")
    view = sch.single_code()
    if seq is None:
        seq = _guard(derive_generator_sequence, view)
        reduced = tuple(seq)
    else:
        from .schemes import reduce_sequence

        reduced = reduce_sequence(sch, seq)
    report = check_view(view, reduced)
    premature = heuristic_no_premature_logical(sch)
    almost = heuristic_no_almost_stabilizer(sch)
    limit = bound(view.n, view.n, cfg.p_b)
    data = report.as_dict()
    data["heuristics"] = {"no_premature_logical": premature, "no_almost_stabilizer": almost}
    data["bound"] = str(limit)
    data["scheme"] = sch.name or "custom"
    if cfg.fmt == "json":
        out = json.dumps(data, indent=2) + "\n"
    elif cfg.fmt == "csv":
        row = {"scheme": data["scheme"], "ok": report.ok, "generating": report.generating}
        row.update({f"condition_{c}": report.passed[c] for c in sorted(report.passed)})
        row.update({"no_premature_logical": premature, "no_almost_stabilizer": almost, "bound": str(limit)})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
        out = buf.getvalue()
    else:
        out = (
            f"scheme {data['scheme']}\n{report.to_text()}\n"
            f"heuristic no premature logical: {'yes' if premature else 'no'}\n"
            f"heuristic no almost-stabilizer: {'yes' if almost else 'no'}\n"
            f"bound at P_B={cfg.p_b}: {limit}\n"
            f"result: {'PASS' if report.ok else 'FAIL'}\n"
        )
    if cfg.output is not None:
        cfg.output.write_text(out)
    else:
        click.echo(out, nl=False)
    sys.exit(EXIT_OK if report.ok else EXIT_FAIL)


@main.command()
@_scheme_options
@_common_options
@click.option("--cap", type=click.IntRange(min=1), default=DEFAULT_CAP, show_default=True, help="Max attempted BMs.")
@click.option("--timing", is_flag=True, help="Add a wall_time column.")
def exact(family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers, cap, timing):
    """Exact success probability by outcome-pattern enumeration."""
    cfg = _config("exact", family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers, cap=cap, timing=timing)
    sch, _ = _guard(resolve_scheme, cfg)
    t0 = time.perf_counter()
    res = _guard(exact_success_probability, sch, cfg.p_b, cfg.cap, cfg.workers)
    row = result_row(sch, cfg, res.success_probability, wall=time.perf_counter() - t0)
    emit([row], cfg, f"{row['scheme']}: {res.success_probability}\n")


@main.command()
@_scheme_options
@_common_options
@click.option("--trials", type=click.IntRange(min=1), default=100_000, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--cap", type=click.IntRange(min=1), default=DEFAULT_CAP, show_default=True, help="Max attempted BMs for the exact column.")
@click.option("--timing", is_flag=True, help="Add a wall_time column.")
def mc(family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers, trials, seed, cap, timing):
    """Monte-Carlo estimate from two-code stabilizer trials."""
    cfg = _config(
        "mc", family, r, m, branching, scheme, scheme_file, code_file, pb, fmt, output, workers,
        trials=trials, seed=seed, cap=cap, timing=timing,
    )
    sch, _ = _guard(resolve_scheme, cfg)
    t0 = time.perf_counter()
    res = _guard(monte_carlo, sch, cfg.trials, cfg.p_b, cfg.seed, cfg.workers)
    wall = time.perf_counter() - t0
    try:
        ex = exact_success_probability(sch, cfg.p_b, cfg.cap, 1).success_probability
    except CapExceeded:
        ex = None
    row = result_row(sch, cfg, ex, res, wall)
    text = (
        f"{row['scheme']}: {res.estimate:.6f} +- {res.stderr:.6f} "
        f"({res.successes}/{res.trials}, logical errors {res.logical_errors}, seed {res.seed})"
        + (f", exact {ex} = {float(ex):.6f}" if ex is not None else "")
        + "\n"
    )
    emit([row], cfg, text)
    if res.logical_errors:
        sys.exit(EXIT_FAIL)


@main.command("bound")
@click.option("--n1", type=click.IntRange(min=1), required=True)
@click.option("--n2", type=click.IntRange(min=1), required=True)
@click.option("--pb", type=PB, default="1/2", show_default=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path))
def bound_cmd(n1, n2, pb, fmt, output):
    """Best achievable logical success probability."""
    cfg = RunConfig("bound", p_b=pb, fmt=fmt, output=output)
    value = bound(n1, n2, pb)
    row = {"n1": n1, "n2": n2, "pb": str(pb), "bound": str(value), "num": value.numerator, "den": value.denominator}
    emit([row], cfg, f"{value}\n")


@main.command("physbm")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path))
def physbm_cmd(fmt, output):
    """Analyzer output states, pattern classes and P_B."""
    cfg = RunConfig("physbm", fmt=fmt, output=output)
    p = physbm.success_probability()
    rows = []
    for name, state in physbm.output_table():
        for occ in sorted(state.amps, reverse=True):
            rows.append({"input": name, "pattern": "".join(map(str, occ)), "amplitude": state.amps[occ].render()})
    lines = [f"{name} -> {state.render()}" for name, state in physbm.output_table()]
    lines.append("")
    for occ in physbm.two_photon_patterns():
        lines.append(f"{''.join(map(str, occ))}: {_class_text(physbm.classify_pattern(occ))}")
    lines.append(f"P_B = {p}")
    emit(rows, cfg, "\n".join(lines) + "\n")


def _class_text(cls) -> str:
    if isinstance(cls, physbm.Unambiguous):
        return cls.name
    if isinstance(cls, physbm.Partial):
        return f"partial zz={cls.zz:+d} z1={cls.z1:+d} z2={cls.z2:+d}"
    return "never observed"


def compare_rows(dmax: int, p_b: Fraction, workers: int = 1) -> list[dict]:
    """Simple static, optimized static and feedforward on the d×d rotated code."""
    rows = []
    for d in range(2, dmax + 1):
        simple = build_static("simple", params=(d, d))
        optimized = build_static("optimized", params=(d, d))
        s = exact_success_probability(simple, p_b, workers=workers).success_probability
        if d <= 3:
            # independent 2^(d^2) loop
            if flat_static_probability(simple, p_b) != s:
                raise AssertionError(f"simple static d={d}: enumeration disagrees with the flat loop")
        o = exact_success_probability(optimized, p_b, workers=workers).success_probability
        closed = 1 - (1 - p_b) ** (d * d)
        ff_scheme, _ = build_optimal("rotated", (d, d))
        ff = exact_adaptive(ff_scheme, p_b).success_probability
        if ff != closed:
            raise AssertionError(f"feedforward d={d}: {ff} != {closed}")
        rows.append({"d": d, "simple_exact": str(s), "optimized_exact": str(o), "feedforward_exact": str(closed)})
    return rows


@main.command("compare-rotated")
@click.option("--dmax", type=click.IntRange(2, 5), default=5, show_default=True)
@click.option("--big", is_flag=True, help=f"Allow the simple static enumeration beyond d={BIG_SIMPLE_DIM}.")
@click.option("--pb", type=PB, default="1/2", show_default=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
def compare_rotated(dmax, big, pb, fmt, output, workers):
    """Three-scheme comparison on the rotated surface code."""
    cfg = RunConfig("compare-rotated", p_b=pb, fmt=fmt, output=output, workers=workers)
    if dmax > BIG_SIMPLE_DIM and not big:
        _fail(EXIT_CAP, f"d={dmax} needs {dmax * dmax} attempted BMs in the simple static enumeration; pass --big")
    try:
        rows = compare_rows(dmax, pb, workers)
    except AssertionError as exc:
        _fail(EXIT_FAIL, str(exc))
    emit(rows, cfg)


if __name__ == "__main__":
    main()
