"""
Subcommands of the liedim command line.

Every command builds a ``Report``. Human-readable lines go to standard
output, the JSON report goes to the ``--json`` path (or standard output
for ``--json -``) and diagnostics go to standard error.

Exit codes: 0 success, 1 a check failed, 2 invalid input or any error.
"""
import argparse
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.cli.parser import PresentationFile, format_relators
from src.cli.report import Report, Timer, sha256_text
from src.counterexample import verify_counterexample
from src.dimsub import (
    DimQuery,
    dimension_quotient,
    fox_intersection,
    relation_module_invariants,
    sandwich_check,
    sjogren_lattices,
)
from src.fplie import Presentation, lower_central_factors, nilpotent_quotient, preabelianize
from src.invariant_suite import run_invariant_suite
from src.settings import Settings, load_settings
from src.utils.error_handling import EXIT_CHECK_FAILED, EXIT_OK, InputError, error_handler
from src.utils.logging import configure_logging, get_logger

logger = get_logger(__name__)

SUITE_CLASS_CAP = 4


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"Cannot read presentation file {path}: {e}", details={"path": path})


def _load(args: argparse.Namespace, default_cap: Optional[int] = None,
          min_lie_cap: int = 1) -> Tuple[Presentation, str]:
    text = _read_file(args.file)
    parsed = PresentationFile.parse(text)
    pres = parsed.to_presentation(cap=args.cap, default_cap=default_cap, min_lie_cap=min_lie_cap)
    return pres, text


def _report(args: argparse.Namespace, text: Optional[str] = None) -> Report:
    return Report(
        command=args.command,
        arguments=list(args.argv),
        input_path=getattr(args, "file", None),
        input_sha256=sha256_text(text) if text is not None else None,
    )


def cmd_nilquot(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args)
    nq = nilpotent_quotient(pres)
    factors = lower_central_factors(nq)
    report = _report(args, text)
    report.results = {
        "presentation": pres.describe(),
        "class_cap": pres.class_cap,
        "invariants": nq.invariants.to_dict(),
        "lower_central_factors": [f.to_dict() for f in factors],
        "relator_lattice": pres.relator_lattice.to_dict(),
    }
    report.summary = [f"L/gamma_{pres.class_cap + 1}(L) = {nq.invariants}"]
    report.summary.extend(f"gamma_{n}/gamma_{n + 1} = {f}" for n, f in enumerate(factors, start=1))
    report.timing = timer.total()
    return report


def cmd_dimquot(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args, default_cap=args.n, min_lie_cap=args.n)
    query = DimQuery(pres, args.n, cap_A=args.cap_assoc, project=args.cap_assoc is None)
    result = dimension_quotient(query)
    report = _report(args, text)
    report.results = result.to_dict()
    report.results["trivial"] = result.is_trivial
    report.summary = [f"delta_{args.n}/gamma_{args.n} = {result.quotient}"]
    report.summary.extend(f"witness: {w}" for w in report.results["witnesses"])
    report.timing = timer.total()
    return report


def cmd_preabelian(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args)
    pd = preabelianize(pres)
    relators = format_relators(pd.ctx, pd.presentation.relators)
    report = _report(args, text)
    report.results = {
        "divisors": list(pd.divisors),
        "relators": relators,
        "transform": [list(row) for row in pd.transform],
        "inverse": [list(row) for row in pd.inverse],
    }
    report.summary = [f"divisors: {' '.join(str(d) for d in pd.divisors)}"]
    report.summary.extend(f"rel: {r};" for r in relators)
    report.timing = timer.total()
    return report


def cmd_verify_counterexample(args: argparse.Namespace, settings: Settings) -> Report:
    result = verify_counterexample(cap_A=args.cap_assoc)
    report = _report(args)
    report.results = result.to_dict()
    report.timing = report.results.pop("timing")
    report.passed = result.passed
    report.summary = [
        f"class-3 quotient: {result.class3_quotient}",
        f"a in delta_4: {result.a_in_delta4}",
        f"a in gamma_4: {result.a_in_gamma4}",
        f"2a in gamma_4: {result.twice_a_in_gamma4}",
        f"delta_4/gamma_4 = {result.dimension_report.quotient}",
        "PASS" if result.passed else "FAIL",
    ]
    return report


def cmd_fox(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args, default_cap=args.n + 1, min_lie_cap=args.n + 1)
    ctx = pres.ctx
    relators = list(pres.relators)
    lattice = fox_intersection(ctx, relators, args.n, cap_A=args.cap_assoc)
    report = _report(args, text)
    report.results = {"n": args.n, "lie_cap": ctx.cap, "fox_intersection": lattice.to_dict()}
    report.summary = [f"F n w^{args.n} r: rank {lattice.rank} in dimension {ctx.dimension}"]
    if args.n == 1:
        if all(len(r.degrees()) == 1 for r in relators):
            invariants = relation_module_invariants(ctx, relators)
            report.results["relation_module"] = invariants.to_dict()
            report.summary.append(f"R/(F n w r) = {invariants}")
        sandwich = sandwich_check(ctx, relators)
        report.results["sandwich"] = sandwich.to_dict()
        report.passed = sandwich.passed
        report.summary.append(f"sandwich: {'PASS' if sandwich else 'FAIL'}")
    report.timing = timer.total()
    return report


def cmd_sjogren(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args, default_cap=args.n + 1, min_lie_cap=args.n + 1)
    left, right = sjogren_lattices(pres.ctx, list(pres.relators), args.n)
    report = _report(args, text)
    report.passed = left == right
    report.results = {
        "n": args.n,
        "equal": report.passed,
        "left": left.to_dict(),
        "right": right.to_dict(),
    }
    report.summary = [
        f"F n (w^{args.n + 1} + r({args.n - 1})): rank {left.rank}",
        f"gamma_{args.n + 1} + R({args.n - 1}): rank {right.rank}",
        "PASS" if report.passed else "FAIL",
    ]
    report.timing = timer.total()
    return report


def cmd_check(args: argparse.Namespace, settings: Settings) -> Report:
    timer = Timer()
    pres, text = _load(args, default_cap=SUITE_CLASS_CAP, min_lie_cap=SUITE_CLASS_CAP)
    seed = settings.seed if args.seed is None else args.seed
    trials = settings.trials if args.trials is None else args.trials
    results = run_invariant_suite(pres, seed=seed, trials=trials)
    report = _report(args, text)
    report.results = results
    report.passed = results["passed"]
    for block in ("presentation", "random"):
        for name, entry in results[block]["checks"].items():
            report.summary.append(f"{block}/{name}: {'PASS' if entry['passed'] else 'FAIL'}")
    report.timing = timer.total()
    return report


EXIT_CODES_HELP = """\
exit codes:
  0  success, every check passed
  1  a check failed
  2  input error (bad file, invalid query, configuration); unexpected internal
     errors also exit 2, with "internal": true in the error record on stderr
"""

COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Report]] = {
    "nilquot": cmd_nilquot,
    "dimquot": cmd_dimquot,
    "preabelian": cmd_preabelian,
    "verify-counterexample": cmd_verify_counterexample,
    "fox": cmd_fox,
    "sjogren": cmd_sjogren,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liedim",
        description="Lower central series and dimension subrings of finitely presented Lie rings.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="OUT", default=None,
                        help="write the JSON report to OUT ('-' for standard output)")

    def with_file(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="presentation file")
        p.add_argument("--cap", type=int, default=None, help="class cap (overrides the file)")

    def with_n(p: argparse.ArgumentParser) -> None:
        p.add_argument("-n", type=int, required=True, help="index of the filtration term")

    def with_cap_assoc(p: argparse.ArgumentParser, text: str = "degree cap of the enveloping algebra") -> None:
        p.add_argument("--cap-assoc", metavar="D", type=int, default=None, help=text)

    unprojected = ("degree cap of the enveloping algebra; when given, delta_n is computed "
                   "in words of degree <= D instead of the default projection to degree < n")

    p = subparsers.add_parser("nilquot", parents=[common], help="additive invariants of L/gamma_{c+1}")
    with_file(p)

    p = subparsers.add_parser("dimquot", parents=[common], help="delta_n/gamma_n")
    with_file(p)
    with_n(p)
    with_cap_assoc(p, unprojected)

    p = subparsers.add_parser("preabelian", parents=[common], help="preabelian form of a presentation")
    with_file(p)

    p = subparsers.add_parser("verify-counterexample", parents=[common],
                              help="golden run of the built-in delta_4 != gamma_4 example")
    with_cap_assoc(p, unprojected)

    p = subparsers.add_parser("fox", parents=[common], help="F n w^n r and the sandwich inclusions")
    with_file(p)
    with_n(p)
    with_cap_assoc(p)

    p = subparsers.add_parser("sjogren", parents=[common], help="F n (w^(n+1) + r(n-1)) = gamma_{n+1} + R(n-1)")
    with_file(p)
    with_n(p)

    p = subparsers.add_parser("check", parents=[common], help="full invariant suite")
    with_file(p)
    p.add_argument("--seed", type=int, default=None, help="seed of the random families (default LIEDIM_SEED)")
    p.add_argument("--trials", type=int, default=None, help="instances per random family (default LIEDIM_TRIALS)")
    return parser


def _emit(report: Report, args: argparse.Namespace) -> None:
    if args.json == "-":
        print(report.to_json())
        return
    for line in report.summary:
        print(line)
    if args.json:
        report.write(args.json)


@error_handler
def execute(args: argparse.Namespace) -> int:
    settings = load_settings()
    configure_logging(log_level=args.log_level or settings.log_level, log_file=settings.log_file,
                      json_format=settings.json_logs)
    start = time.perf_counter()
    report = COMMANDS[args.command](args, settings)
    _emit(report, args)
    logger.info(f"{args.command} finished in {time.perf_counter() - start:.2f} seconds",
                extra={"passed": report.passed})
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    argv_list: List[str] = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv_list)
    args.argv = argv_list
    return execute(args)
