"""``logdpp`` command line.  Every subcommand writes a CSV report, to
standard output unless ``--out`` is given.

Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

from . import closedform as cf
from .checks import run_suite
from .fekete import energy_report, epsilon_exact
from .orthopoly import KernelContext
from .quadrature import expected_energy_result, integrate_L1, integrate_L2, integrate_L3
from .report import EnergyRow, fmt, rows_to_csv, timed

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    """Invalid argument combination (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def parse_int_list(text: str):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def parse_grid(text: str):
    """'a:b:step' (inclusive of b) or a comma list of values."""
    try:
        if ":" not in text:
            return [float(v) for v in text.split(",") if v.strip()]
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc
    if not step > 0 or b < a:
        raise UsageError("grid needs step > 0 and b >= a")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


# ---------------------------------------------------------------------------
# commands (each returns CSV text)

def cmd_fekete(n_list, timing=False) -> str:
    if not n_list or any(n < 2 for n in n_list):
        raise UsageError("fekete needs n >= 2")
    rows = energy_report(n_list)
    if not timing:
        rows = [EnergyRow(r.method, r.quantity, r.lam, r.n_points, r.value, r.error)
                for r in rows]
    return rows_to_csv(rows, timing)


def _dpp_rows(lam, n, mode, samples, seed, tol):
    npts = n + 1
    rows = []
    if mode == "closed":
        if lam == 0.0:
            if n < 1:
                raise UsageError("closed mode needs n >= 1")
            for quantity, fn in (("E", lambda: cf.E0_exact(npts)), ("L1", lambda: cf.L1_cheb(n)),
                                 ("L2", lambda: cf.L2_cheb(n)),
                                 ("L3", lambda: cf.L3_exact(0.0, n))):
                value, ms = timed(fn)
                rows.append(EnergyRow("closed_form", quantity, lam, npts, value, None, ms))
        else:
            value, ms = timed(lambda: cf.L3_exact(lam, n))
            rows.append(EnergyRow("closed_form", "L3", lam, npts, value, None, ms))
    elif mode == "quad":
        for quantity, fn in (("E", expected_energy_result), ("L1", integrate_L1),
                             ("L2", integrate_L2), ("L3", integrate_L3)):
            res, ms = timed(lambda: fn(lam, n, tol))
            rows.append(EnergyRow("quadrature", quantity, lam, npts, res.value,
                                  res.error_estimate, ms))
    elif mode == "mc":
        from .dpp import mc_expected_energy

        if samples is None or samples < 2:
            raise UsageError("mc mode needs --samples >= 2")
        est, ms = timed(lambda: mc_expected_energy(KernelContext.build(lam, n), samples, seed))
        rows.append(EnergyRow("monte_carlo", "E", lam, npts, est.mean, est.std_error, ms))
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return rows


def cmd_dpp(lam, n, mode, samples=None, seed=0, tol=None, timing=False) -> str:
    if not lam > -0.5:
        raise UsageError("lambda must exceed -1/2")
    if n < 0:
        raise UsageError("n must be >= 0")
    return rows_to_csv(_dpp_rows(lam, n, mode, samples, seed, tol), timing)


def cmd_sweep(lambda_grid, n, tol=None, timing=False) -> str:
    """Quadrature E(lam, n+1) for each lam plus the minimal energy of n+1
    points for comparison."""
    if not lambda_grid:
        raise UsageError("empty lambda grid")
    if any(not lam > -0.5 for lam in lambda_grid):
        raise UsageError("every lambda must exceed -1/2")
    if n < 1:
        raise UsageError("sweep needs n >= 1")
    eps, ms = timed(lambda: epsilon_exact(n + 1))
    rows = [EnergyRow("epsilon_exact", "energy", None, n + 1, eps, None, ms)]
    for lam in lambda_grid:
        res, ms = timed(lambda: expected_energy_result(lam, n, tol))
        rows.append(EnergyRow("quadrature", "E", lam, n + 1, res.value, res.error_estimate, ms))
    return rows_to_csv(rows, timing)


def cmd_verify(suite: str):
    """Returns (csv_text, all_passed)."""
    if suite not in ("lemmas", "kernels", "all"):
        raise UsageError(f"unknown suite {suite!r}")
    checks = run_suite(suite)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("check_id", "expected", "observed", "tolerance", "pass"))
    for c in checks:
        writer.writerow((c.check_id, fmt(c.expected), fmt(c.observed), fmt(c.tolerance),
                         "true" if c.passed else "false"))
    return buf.getvalue(), all(c.passed for c in checks)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logdpp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output CSV path (default: standard output)")
        p.add_argument("--timing", action="store_true",
                       help="record runtimes (otherwise runtime_ms is 0 for reproducible output)")

    p = sub.add_parser("fekete", help="Fekete energy vs exact and asymptotic formulas")
    p.add_argument("--n", required=True, help="comma-separated point counts, each >= 2")
    common(p)

    p = sub.add_parser("dpp", help="expected energy of the (n+1)-point Gegenbauer DPP")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="kernel degree (n+1 points)")
    p.add_argument("--mode", choices=("closed", "quad", "mc"), default="quad")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    common(p)

    p = sub.add_parser("sweep", help="expected energy over a grid of lambda values")
    p.add_argument("--grid", required=True, help="'a:b:step' or comma list of lambda values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float)
    common(p)

    p = sub.add_parser("verify", help="run the oracle check suites")
    p.add_argument("--suite", choices=("lemmas", "kernels", "all"), default="all")
    p.add_argument("--out")
    return parser


def _write(text: str, path) -> int:
    if path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"logdpp: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    status = EXIT_OK
    try:
        if args.command == "fekete":
            text = cmd_fekete(parse_int_list(args.n), args.timing)
        elif args.command == "dpp":
            text = cmd_dpp(args.lam, args.n, args.mode, args.samples, args.seed, args.tol,
                           args.timing)
        elif args.command == "sweep":
            text = cmd_sweep(parse_grid(args.grid), args.n, args.tol, args.timing)
        else:
            text, ok = cmd_verify(args.suite)
            status = EXIT_OK if ok else EXIT_VERIFY
    except UsageError as exc:
        print(f"logdpp: {exc}", file=sys.stderr)
        return EXIT_ARGS
    written = _write(text, args.out)
    return written if written != EXIT_OK else status


if __name__ == "__main__":
    sys.exit(main())
