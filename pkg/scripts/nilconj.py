#!/usr/bin/env python3
"""
nilconj: normal forms, conjugacy and conjugator length in class-2 nilpotent groups.

Usage:
    python nilconj.py nf --group gm:1 "b1 a1"
    python nilconj.py conj --group gm:2 "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2" "b1 b2^2"
    python nilconj.py cl --group assets/heisenberg.txt "a2 a1" "a2 a1 c1"
    python nilconj.py gm --m 3 --n 4..16
    python nilconj.py selftest

Exit codes:
    0  success / conjugate
    1  not conjugate, or a failed self-test
    2  usage, parse or presentation error
    3  search budget exceeded (best incumbent printed)
"""

import argparse
import json
import sys
from dataclasses import dataclass

from conjugacy import ConjugacyReport, NotConjugateError, analyze_conjugacy, change_of_variables
from gm_lab import (
    MAX_CL,
    experiment_csv_writer,
    growth_experiment,
    make_gm,
    random_cl_survey,
    write_slope_line,
)
from intlinalg import SearchBudgetExceeded, VerificationError, dump_matrix_csv, dump_vector_csv
from presentation import CentralExtensionPresentation, NilconjError, heisenberg, load_presentation
from selftest import FAULTS, run_selftest
from utils import (
    format_duration,
    get_default_budget,
    get_default_format,
    get_default_seed,
    parse_int_range,
    print_status,
    progress,
)
from words import collect, parse_word, render_normal_form, render_word

FORMATS = ("text", "csv", "json")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


# =============================================================================
# Configuration
# =============================================================================

@dataclass(frozen=True)
class CliConfig:
    """Settings shared by every subcommand, from flags over environment defaults."""

    group: str | None
    format: str
    budget: int
    seed: int
    dump_system: bool = False

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        return cls(
            group=getattr(args, "group", None),
            format=args.format or get_default_format(),
            budget=args.budget if args.budget is not None else get_default_budget(),
            seed=args.seed if args.seed is not None else get_default_seed(),
            dump_system=getattr(args, "dump_system", False),
        )


def resolve_group(source: str | None) -> CentralExtensionPresentation:
    """
    Presentation named by --group: `gm:<m>`, `heisenberg`, or a file path.

    Raises:
        ValueError: missing or malformed source
        PresentationError: invalid presentation data
        FileNotFoundError: missing file
    """
    if not source:
        raise ValueError("a presentation is required: --group <path|gm:m|heisenberg>")
    if source == "heisenberg":
        return heisenberg()
    if source.startswith("gm:"):
        try:
            m = int(source[3:])
        except ValueError:
            raise ValueError(f"malformed builtin {source!r}; expected gm:<m>")
        return make_gm(m)
    return load_presentation(source)


def emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def emit_json(data) -> None:
    emit(json.dumps(data, indent=2))


# =============================================================================
# Subcommands
# =============================================================================

def cmd_nf(config: CliConfig, word_text: str) -> int:
    """Print the normal form of a word."""
    P = resolve_group(config.group)
    g = collect(P, parse_word(P, word_text))
    rendered = render_normal_form(P, g)

    if config.format == "json":
        emit_json({"normal_form": rendered, "x": list(g.x), "z": list(g.z), "t": list(g.t)})
    elif config.format == "csv":
        lines = ["generator,exponent"]
        lines += [f"{name},{e}" for name, e in zip(P.names, g.x + g.central)]
        emit("\n".join(lines))
    else:
        emit(rendered)
        emit(f"x = {list(g.x)}")
        emit(f"z = {list(g.z)}")
        emit(f"t = {list(g.t)}")
    return EXIT_OK


def dump_system(report: ConjugacyReport) -> dict[str, str]:
    """M, b, M' and Pmat in the `r,d` CSV debug format."""
    if report.system is None:
        return {}
    transformed, pmat = change_of_variables(report.system)
    return {
        "M": dump_matrix_csv(report.system.M),
        "b": dump_vector_csv(report.system.b),
        "M'": dump_matrix_csv(transformed.M),
        "Pmat": dump_matrix_csv(pmat),
    }


def _report_payload(P: CentralExtensionPresentation, report: ConjugacyReport) -> dict:
    cert = report.certificate
    payload = {
        "conjugate": report.conjugate,
        "input_size": report.input_size,
        "minor_bound": report.minor_bound,
        "theoretical_bound": report.theoretical_bound,
        "notes": report.notes,
    }
    if cert is not None:
        payload.update(
            witness=render_word(P, cert.witness_word) or "1",
            a_exponents=list(cert.a_exponents),
            length=cert.length,
            optimal=cert.optimal,
            exact=cert.exact,
        )
    return payload


def _decide(config: CliConfig, u_text: str, v_text: str) -> tuple[CentralExtensionPresentation, ConjugacyReport]:
    P = resolve_group(config.group)
    u, v = parse_word(P, u_text), parse_word(P, v_text)
    return P, analyze_conjugacy(P, u, v, budget=config.budget)


def _emit_dump(config: CliConfig, report: ConjugacyReport, payload: dict) -> None:
    if not config.dump_system:
        return
    blocks = dump_system(report)
    if config.format == "json":
        payload["system"] = blocks
        return
    for name, block in blocks.items():
        emit(f"# {name}")
        emit(block)


def _exit_for(report: ConjugacyReport) -> int:
    if report.certificate is None:
        return EXIT_NEGATIVE
    if not report.certificate.optimal:
        print_status("Search budget exhausted; printed certificate is the best found, not certified minimal", "warning")
        return EXIT_BUDGET
    return EXIT_OK


def cmd_conj(config: CliConfig, u_text: str, v_text: str) -> int:
    """Decide conjugacy and print a certificate."""
    P, report = _decide(config, u_text, v_text)
    payload = _report_payload(P, report)
    _emit_dump(config, report, payload)

    if config.format == "json":
        emit_json(payload)
    elif config.format == "csv":
        emit("result,length,witness")
        if report.conjugate:
            emit(f"conjugate,{payload['length']},{payload['witness']}")
        else:
            emit("not-conjugate,,")
    elif report.conjugate:
        emit("conjugate")
        emit(f"witness: {payload['witness']}")
        emit(f"length: {payload['length']}")
    else:
        emit("not-conjugate")

    for note in report.notes:
        print_status(note, "info")
    return _exit_for(report)


def cmd_cl(config: CliConfig, u_text: str, v_text: str) -> int:
    """Print the exact conjugator length and a minimizer."""
    P, report = _decide(config, u_text, v_text)
    payload = _report_payload(P, report)
    _emit_dump(config, report, payload)

    if config.format == "json":
        emit_json(payload)
    elif not report.conjugate:
        emit("not-conjugate")
    elif config.format == "csv":
        emit("cl,minimizer")
        emit(f"{payload['length']},{payload['witness']}")
    else:
        emit(str(payload["length"]))
        emit(f"minimizer: {payload['witness']}")
        if not report.certificate.exact:
            print_status("Torsion centre: the value is an upper bound on the conjugator length", "warning")
    return _exit_for(report)


def cmd_gm_experiment(
    config: CliConfig,
    m: int,
    n_min: int,
    n_max: int,
    max_cl: int = MAX_CL,
    time_budget: float | None = None,
) -> int:
    """Growth experiment on the G_m witness family; CSV unless --format json."""
    if m < 1:
        raise ValueError(f"--m must be at least 1, got {m}")
    print_status(f"G_{m} witness pairs for n = {n_min}..{n_max}", "info")

    writer = experiment_csv_writer(sys.stdout) if config.format != "json" else None

    def report_row(record):
        print_status(f"n={record.n}: cl={record.cl} in {format_duration(record.wall_time_s)}", "progress")
        if writer is not None:
            writer.writerow(record.to_row())
            sys.stdout.flush()

    result = growth_experiment(
        m,
        range(n_min, n_max + 1),
        budget=config.budget,
        max_cl=max_cl,
        time_budget=time_budget,
        on_record=report_row,
    )

    if writer is not None:
        write_slope_line(sys.stdout, result.slope)
    else:
        emit_json({
            "records": [r.to_row() for r in result.records],
            "slope": result.slope,
            "truncated": result.truncated,
        })

    if result.truncated:
        print_status(f"Stopped early: {result.truncated}", "warning")
    if result.slope is not None:
        print_status(f"Fitted growth exponent {result.slope:.4f} (m + 1 = {m + 1})", "success")
    return EXIT_OK


def cmd_selftest(config: CliConfig, inject: str | None = None) -> int:
    """Run the self-test; exit 0 iff every property holds."""
    report = run_selftest(seed=config.seed, budget=config.budget, inject=inject)
    if config.format == "json":
        emit_json({
            "seed": report.seed,
            "passed": report.passed,
            "results": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in report.results],
        })
    else:
        emit(report.render())

    if report.passed:
        print_status("All self-test properties hold", "success")
        return EXIT_OK
    print_status(f"Failed properties: {', '.join(report.failures)}", "error")
    return EXIT_NEGATIVE


def cmd_survey(config: CliConfig, size: int, samples: int) -> int:
    """Diagnostic conjugator-length statistics over random conjugate pairs."""
    P = resolve_group(config.group)
    summary = random_cl_survey(
        P,
        seed=config.seed,
        size=size,
        samples=samples,
        budget=config.budget,
        progress_wrap=lambda items: progress(items, desc="survey", total=samples),
    )
    data = {
        "samples": summary.samples,
        "max_cl": summary.max_cl,
        "mean_cl": round(summary.mean_cl, 6),
        "max_ratio": round(summary.max_ratio, 6),
    }
    if summary.worst_pair is not None:
        data["worst_u"] = render_word(P, summary.worst_pair[0]) or "1"
        data["worst_v"] = render_word(P, summary.worst_pair[1]) or "1"

    if config.format == "json":
        emit_json(data)
    elif config.format == "csv":
        emit(",".join(data))
        emit(",".join(str(v) for v in data.values()))
    else:
        for key, value in data.items():
            emit(f"{key}: {value}")
    return EXIT_OK


# =============================================================================
# CLI Interface
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    options = common.add_argument_group("Common Options")
    options.add_argument("--format", choices=FORMATS, help="Output format (default: NILCONJ_FORMAT or text)")
    options.add_argument("--budget", type=int, help="Search node budget (default: NILCONJ_BUDGET or 10^7)")
    options.add_argument("--seed", type=int, help="Seed for randomized subcommands (default: NILCONJ_SEED or 0)")

    group_opt = argparse.ArgumentParser(add_help=False)
    group_opt.add_argument("--group", "-g", required=True,
                           help="Presentation file (.json or text), gm:<m>, or heisenberg")

    parser = argparse.ArgumentParser(
        description="Conjugacy and conjugator length in class-2 nilpotent groups",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Normal form of a word:
  python nilconj.py nf --group gm:1 "b1 a1"

  # Decide conjugacy, print a certificate and the linear system:
  python nilconj.py conj --group gm:2 "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2" "b1 b2^2" --dump-system

  # Exact conjugator length:
  python nilconj.py cl --group assets/heisenberg.txt "a1 a2" "a1 a2 c1^3"

  # Growth experiment (CSV on stdout):
  python nilconj.py gm --m 3 --n 4..16 > gm3.csv

  # Self-test and a random survey:
  python nilconj.py selftest --seed 1
  python nilconj.py survey --group gm:2 --samples 200 --size 8
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Subcommand")

    nf_parser = subparsers.add_parser("nf", parents=[common, group_opt], help="Normal form of a word")
    nf_parser.add_argument("word", help="Word such as \"b1 a1^-2 c1\" (quote it; `1` or \"\" is the identity)")

    for name, help_text in (("conj", "Decide conjugacy of two words"), ("cl", "Exact conjugator length")):
        sub = subparsers.add_parser(name, parents=[common, group_opt], help=help_text)
        sub.add_argument("u", help="First word")
        sub.add_argument("v", help="Second word")
        sub.add_argument("--dump-system", action="store_true", help="Print M, b, M' and Pmat as r,d CSV blocks")

    gm_parser = subparsers.add_parser("gm", parents=[common], help="G_m growth experiment")
    gm_group = gm_parser.add_argument_group("Experiment")
    gm_group.add_argument("--m", type=int, required=True, help="Family index m >= 1")
    gm_group.add_argument("--n", default="2..10", help="Range of n as a..b or a single value (default: 2..10)")
    gm_group.add_argument("--max-cl", type=int, default=MAX_CL, help="Stop once cl exceeds this (default: 10^8)")
    gm_group.add_argument("--time-budget", type=float, help="Stop after this many seconds")

    st_parser = subparsers.add_parser("selftest", parents=[common], help="Run the invariant self-test")
    st_parser.add_argument("--inject", choices=FAULTS, help="Inject a fault (negative control)")

    sv_parser = subparsers.add_parser("survey", parents=[common, group_opt], help="Random conjugator-length survey")
    sv_parser.add_argument("--samples", type=int, default=100, help="Number of random pairs (default: 100)")
    sv_parser.add_argument("--size", type=int, default=8, help="Maximum |u| and |w| (default: 8)")

    return parser


def run(args: argparse.Namespace) -> int:
    config = CliConfig.from_args(args)
    if args.command == "nf":
        return cmd_nf(config, args.word)
    if args.command == "conj":
        return cmd_conj(config, args.u, args.v)
    if args.command == "cl":
        return cmd_cl(config, args.u, args.v)
    if args.command == "gm":
        n_min, n_max = parse_int_range(args.n)
        return cmd_gm_experiment(config, args.m, n_min, n_max, args.max_cl, args.time_budget)
    if args.command == "selftest":
        return cmd_selftest(config, args.inject)
    if args.command == "survey":
        return cmd_survey(config, args.size, args.samples)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return EXIT_ERROR

    try:
        return run(args)
    except SearchBudgetExceeded as e:
        print_status(str(e), "error")
        if e.best is not None:
            emit(f"incumbent: {list(e.best)}")
        return EXIT_BUDGET
    except NotConjugateError as e:
        print_status(str(e), "error")
        emit("not-conjugate")
        return EXIT_NEGATIVE
    except VerificationError as e:
        print_status(f"Internal check failed: {e}", "error")
        return EXIT_ERROR
    except (NilconjError, ValueError, OSError) as e:
        print_status(str(e), "error")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
