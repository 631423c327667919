"""Command-line front end: ``fmd <verb> [options]``.

Verbs ``predict``, ``mass``, ``reduce``, ``extend``, ``limit``,
``sensitivity``, ``geometry`` and ``verify`` evaluate one scenario and write
a CSV or JSON table; ``preset`` runs a named bundle of scenarios and renders
its figures; ``batch`` runs one command per line of a file.

Exit status: 0 on success, 1 when ``verify`` finds a violation, 2 on invalid
input, 3 when a numerical routine cannot reach its tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from .completions import CompletionKind, PaNAssertion, parse_assertion
from .errors import FMDError, PrecisionError
from .io import render_table
from .presets import PRESET_NAMES, preset
from .scenarios import THEOREMS, ScenarioResult, ScenarioSpec, run_scenario

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(FMDError):
    """Command-line arguments that argparse accepts but that are inconsistent."""


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so batch mode can attach line numbers."""

    def error(self, message: str):  # noqa: D401 - argparse API
        raise UsageError(f"{self.prog}: {message}")


def _probability_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(parser: argparse.ArgumentParser, assertion_required: bool = True) -> None:
    g = parser.add_argument_group("assertion")
    g.add_argument("--assertion", help='whole assertion, e.g. "Pa100[25,60,.1,.7]"')
    g.add_argument("--N", type=int, help="number of conditioning events")
    g.add_argument("--a1", type=int, help="lowest frequency-mimicking count")
    g.add_argument("--a2", type=int, help="highest frequency-mimicking count")
    g.add_argument("--pL", type=float, help="floor on p[0,N]")
    g.add_argument("--pU", type=float, help="ceiling on p[N,N]")
    g.add_argument(
        "--completion",
        default="linear",
        choices=[k.value for k in CompletionKind],
        help="completion outside the window (default: linear)",
    )
    o = parser.add_argument_group("output")
    o.add_argument("--out", help="output file (default: standard output)")
    o.add_argument("--format", choices=("csv", "json"), help="table format (default: from --out suffix, else csv)")
    o.add_argument("--log-output", action="store_true", help="write log masses instead of linear masses")
    o.add_argument("--figure", help="also render the scenario's curves to this PNG")
    parser.set_defaults(assertion_required=assertion_required)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fmd", description="Frequency-mimicking predictive distributions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    for verb, text in (
        ("predict", "predictive vector p[a,N] for an assertion"),
        ("mass", "mass function of S_{N+1} with its density histogram"),
        ("geometry", "line representation and concurrency of every reduction triple"),
    ):
        _common(sub.add_parser(verb, help=text, description=text))

    p = sub.add_parser("reduce", help="reduce the mass function to M events")
    _common(p)
    p.add_argument("--M", type=int, required=True, help="number of events after reduction")

    p = sub.add_parser("extend", help="extend the assertion to N+K events")
    _common(p)
    p.add_argument("--K", type=int, required=True, help="number of added events")
    p.add_argument("--pL-ext", type=float, help="floor on p[0,N+K] (default: tightened pL)")
    p.add_argument("--pU-ext", type=float, help="ceiling on p[N+K,N+K] (default: tightened pU)")

    p = sub.add_parser("limit", help="incomplete-beta limit mixture and distance from the FMD")
    _common(p, assertion_required=False)
    p.add_argument("--theta1", required=True, help="lower end of the mimicking interval")
    p.add_argument("--theta2", required=True, help="upper end of the mimicking interval")
    p.add_argument("--margin", type=float, help="interior margin for the distance (default: 2%% of the interval)")

    p = sub.add_parser("sensitivity", help="mass functions for several values of pU")
    _common(p)
    p.add_argument("--pU-list", type=_probability_list, required=True, help="comma-separated pU values")

    p = sub.add_parser("verify", help="check one theorem numerically")
    p.add_argument("theorem", choices=THEOREMS)
    _common(p, assertion_required=False)
    p.add_argument("--a-star", type=int, help="anchor count for theorem4")
    p.add_argument("--K", type=int, help="extension size for theorem5")
    p.add_argument("--pL-ext", type=float)
    p.add_argument("--pU-ext", type=float)
    p.add_argument("--M", type=int, help="reduced size for theorem2")
    p.add_argument("--q0", type=float, help="q[0] for theorem1/theorem2 (default 0)")
    p.add_argument("--q1", type=float, help="q[1] for theorem1/theorem2 (default: half the bound)")

    p = sub.add_parser("preset", help="run a figure preset, writing tables and PNGs to a directory")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--log-output", action="store_true")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("batch", help="run one fmd command per line of FILE ('#' starts a comment)")
    p.add_argument("file", help="command file, or - for standard input")
    return parser


def _assertion_from(args: argparse.Namespace) -> PaNAssertion | None:
    parts = (args.N, args.a1, args.a2, args.pL, args.pU)
    if args.assertion is not None:
        if any(v is not None for v in parts[1:]):
            raise UsageError("give either --assertion or --a1/--a2/--pL/--pU, not both")
        return parse_assertion(args.assertion)
    if all(v is None for v in parts[1:]):
        if args.assertion_required:
            raise UsageError("an assertion is required: --N --a1 --a2 --pL --pU, or --assertion")
        return None
    missing = [f"--{n}" for n, v in zip(("N", "a1", "a2", "pL", "pU"), parts) if v is None]
    if missing:
        raise UsageError(f"incomplete assertion, missing {' '.join(missing)}")
    return PaNAssertion(*parts)


def spec_from_args(args: argparse.Namespace) -> ScenarioSpec:
    """Translate parsed arguments of a scenario verb into a :class:`ScenarioSpec`."""
    verb = args.verb
    if verb == "limit":
        if args.assertion is not None or args.a1 is not None or args.a2 is not None:
            raise UsageError("limit derives a1 and a2 from --theta1/--theta2; give --N, --pL, --pU only")
        A = None
    else:
        A = _assertion_from(args)
    params: dict = {}
    if verb == "reduce":
        params["M"] = args.M
    elif verb == "extend":
        params.update(K=args.K, pL_ext=args.pL_ext, pU_ext=args.pU_ext)
    elif verb == "limit":
        if args.N is None:
            raise UsageError("limit needs --N")
        params.update(N=args.N, theta1=args.theta1, theta2=args.theta2, margin=args.margin)
        if args.pL is not None:
            params["pL"] = args.pL
        if args.pU is not None:
            params["pU"] = args.pU
    elif verb == "sensitivity":
        params["pU_list"] = args.pU_list
    elif verb == "verify":
        params["theorem"] = args.theorem
        if args.theorem in ("theorem1", "theorem2"):
            if args.N is None:
                raise UsageError(f"{args.theorem} needs --N")
            params.update(N=args.N)
            if args.theorem == "theorem2":
                if args.M is None:
                    raise UsageError("theorem2 needs --M")
                params["M"] = args.M
            for key in ("q0", "q1"):
                if getattr(args, key) is not None:
                    params[key] = getattr(args, key)
        else:
            if A is None:
                raise UsageError(f"{args.theorem} needs an assertion")
            if args.theorem == "theorem4":
                if args.a_star is None:
                    raise UsageError("theorem4 needs --a-star")
                params["a_star"] = args.a_star
            if args.theorem == "theorem5":
                if args.K is None:
                    raise UsageError("theorem5 needs --K")
                params.update(K=args.K, pL_ext=args.pL_ext, pU_ext=args.pU_ext)
    name = Path(args.out).stem if args.out else verb
    return ScenarioSpec(name, verb, A, args.completion, params, args.log_output)


def _format_for(path: str | None, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "json" if path and path.lower().endswith(".json") else "csv"


def _dump_summary(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, default=str)


def _emit(result: ScenarioResult, out: str | None, fmt: str, stdout) -> None:
    tables = result.tables
    if out is None:
        for table in tables.values():
            stdout.write(render_table(table, fmt))
        return
    target = Path(out)
    for suffix, table in tables.items():
        path = target if not suffix else target.with_name(f"{target.stem}{suffix}{target.suffix or '.' + fmt}")
        path.write_text(render_table(table, fmt), encoding="utf-8")


def _run_verb(args: argparse.Namespace, stdout, stderr) -> int:
    spec = spec_from_args(args)
    result = run_scenario(spec)
    fmt = _format_for(args.out, args.format)
    if spec.action == "verify":
        for key, value in result.summary.items():
            stdout.write(f"{key}: {value}\n")
        return EXIT_OK if result.passed else EXIT_VERIFY_FAILED
    _emit(result, args.out, fmt, stdout)
    summary_stream = stdout if args.out else stderr
    summary_stream.write(_dump_summary(result.summary) + "\n")
    if args.figure:
        from .plotting import plot_curves

        plot_curves(result.curves, args.figure, title=result.curves[0].label if result.curves else "")
    if spec.action == "geometry" and not result.passed:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _threads() -> int:
    raw = os.environ.get("FMD_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _run_preset(args: argparse.Namespace, stdout) -> int:
    bundle = preset(args.name)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    specs = [
        ScenarioSpec(s.name, s.action, s.assertion, s.completion, s.params, args.log_output)
        for s in bundle.scenarios
    ]
    workers = min(_threads(), len(specs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_scenario, specs))
    by_name = {r.spec.name: r for r in results}
    ext = "." + args.format
    written = []
    for r in results:
        for suffix, table in r.tables.items():
            path = outdir / f"{r.spec.name}{suffix}{ext}"
            path.write_text(render_table(table, args.format), encoding="utf-8")
            written.append(path.name)
    if not args.no_figures:
        from .plotting import plot_curves

        for fig in bundle.figures:
            curves = [c for name in fig.scenarios for c in by_name[name].curves if c.kind in fig.kinds]
            plot_curves(curves, outdir / fig.filename, fig.title, fig.log_density)
            written.append(fig.filename)
    for r in results:
        stdout.write(f"{r.spec.name}: {_dump_summary(r.summary)}\n")
    stdout.write("wrote: " + " ".join(written) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


def _run_batch(args: argparse.Namespace, stdout, stderr) -> int:
    source = sys.stdin if args.file == "-" else open(args.file, encoding="utf-8")
    label = "<stdin>" if args.file == "-" else args.file
    worst = EXIT_OK
    with source:
        for lineno, line in enumerate(source, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            argv = shlex.split(text)
            if argv and argv[0] == "fmd":
                argv = argv[1:]
            if argv and argv[0] == "batch":
                stderr.write(f"{label}:{lineno}: nested batch is not allowed\n")
                return EXIT_INVALID
            code = _dispatch(argv, stdout, stderr, where=f"{label}:{lineno}: ")
            if code in (EXIT_INVALID, EXIT_PRECISION):
                return code
            worst = max(worst, code)
    return worst


def _dispatch(argv: Sequence[str], stdout, stderr, where: str = "") -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.verb == "preset":
            return _run_preset(args, stdout)
        if args.verb == "batch":
            return _run_batch(args, stdout, stderr)
        return _run_verb(args, stdout, stderr)
    except PrecisionError as exc:
        stderr.write(f"{where}precision error: {exc}\n")
        return EXIT_PRECISION
    except FMDError as exc:
        stderr.write(f"{where}error: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        stderr.write(f"{where}error: {exc}\n")
        return EXIT_INVALID


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the exit status."""
    argv = sys.argv[1:] if argv is None else argv
    return _dispatch(argv, sys.stdout, sys.stderr)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
