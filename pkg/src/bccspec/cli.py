"""Command-line front end: ``bccspec spectrum | bounds | simulate``.

Exit status: 0 on success, 1 on usage errors, 2 when a requested spectrum
has no terms at or below ``--dmax``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

from .bounds import (
    BoundQuery,
    ModulationSpec,
    bep_union_bound,
    fer_union_bound,
    parse_grid,
    uncoded_curve,
)
from .code_model import STANDARD_MASKS, PunctureSchedule, schedule_for_rate, G1, G2
from .link_sim import INTERLEAVERS, SimConfig, StopRule, run_sweep, sweep_configs
from .spectrum import compute_spectrum

EXIT_USAGE = 1
EXIT_EMPTY = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _schedule_args(p: argparse.ArgumentParser, multiple: bool) -> None:
    g = p.add_mutually_exclusive_group()
    action = "append" if multiple else "store"
    g.add_argument("--rate", action=action, choices=list(STANDARD_MASKS),
                   help="standard 802.11 code rate" + (" (repeatable)" if multiple else ""))
    g.add_argument("--mask", action=action,
                   help="custom serial puncture mask such as 111001" + (" (repeatable)" if multiple else ""))


def _modulation_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mod", default="qpsk", choices=["bpsk", "qpsk", "16qam", "64qam", "256qam"],
                   help="modulation (default: qpsk)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bccspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="distance spectrum tables")
    _schedule_args(sp, multiple=True)
    sp.add_argument("--dmax", type=_positive_int, default=30)
    sp.add_argument("--terms", type=_positive_int, default=5)
    sp.add_argument("--format", choices=["table", "csv"], default="table")
    sp.add_argument("--out", help="write to this file instead of stdout")

    bp = sub.add_parser("bounds", help="union-bound BEP/FER curves as CSV")
    _schedule_args(bp, multiple=False)
    _modulation_arg(bp)
    bp.add_argument("--snr", default="0:10:0.25", help="Eb/N0 grid start:stop:step in dB")
    bp.add_argument("--terms", type=_positive_int, default=30)
    bp.add_argument("--dmax", type=_positive_int, default=130)
    bp.add_argument("--fer", action="store_true", help="frame error bound instead of bit error bound")
    bp.add_argument("--frame-bits", type=_positive_int, default=1024)
    bp.add_argument("--uncoded", action="store_true", help="also emit the uncoded reference curve")
    bp.add_argument("--raw", action="store_true", help="do not clamp bound values at 1")
    bp.add_argument("--out")

    mp = sub.add_parser("simulate", help="Monte Carlo BER/FER as CSV")
    _schedule_args(mp, multiple=False)
    _modulation_arg(mp)
    mp.add_argument("--snr", default="0:6:1", help="Eb/N0 grid start:stop:step in dB")
    mp.add_argument("--frame-bits", type=_positive_int, default=1024)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--min-frame-errors", type=_positive_int, default=100)
    mp.add_argument("--min-bit-errors", type=_positive_int, default=500)
    mp.add_argument("--max-frames", type=_positive_int, default=10_000_000)
    mp.add_argument("--workers", type=_positive_int, default=1)
    mp.add_argument("--interleaver", choices=INTERLEAVERS, default="none")
    mp.add_argument("--out")
    return parser


def _schedules(args, multiple: bool) -> list[PunctureSchedule]:
    if args.mask:
        masks = args.mask if multiple else [args.mask]
        try:
            return [PunctureSchedule.from_string(m) for m in masks]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rates = (args.rate if multiple else [args.rate]) if args.rate else None
    if rates is None:
        rates = list(STANDARD_MASKS) if multiple else ["1/2"]
    return [schedule_for_rate(r) for r in rates]


def _sci(x: float) -> str:
    return f"{x:.6e}"


def _grouped(n: int) -> str:
    return f"{n:,}"


def cmd_spectrum(args, out) -> int:
    status = 0
    blocks = []
    for sched in _schedules(args, multiple=True):
        spec = compute_spectrum(sched, args.dmax)
        if spec.is_empty:
            print(f"{sched.label}: no terms <= dmax={args.dmax} (d_free exceeds dmax)", file=sys.stderr)
            status = EXIT_EMPTY
            continue
        blocks.append((sched, spec))

    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["rate", "d", "alpha", "beta"])
        for sched, spec in blocks:
            for d, a, b in spec.rows(args.terms):
                w.writerow([str(sched.rate), d, a, b])
        return status

    if blocks:
        print("IEEE 802.11 BCC Distance Spectrum", file=out)
        print(f"K=7, generators {G1:o}_8 / {G2:o}_8", file=out)
        print(f"d_max={args.dmax}, showing first {args.terms} non-zero terms", file=out)
        print("=" * 60, file=out)
    for sched, spec in blocks:
        title = f"Rate {sched.name}" if sched.name else f"Mask {sched} (rate {sched.rate})"
        print(f"\n{title}  (puncture period = {sched.period})", file=out)
        print(f"d_free = {spec.d_free}", file=out)
        print(f"{'d':>7}  {'alpha_d':>22}  {'beta_d':>24}", file=out)
        print(f"  {'-' * 5}  {'-' * 22}  {'-' * 24}", file=out)
        for d, a, b in spec.rows(args.terms):
            print(f"{d:>7}  {_grouped(a):>22}  {_grouped(b):>24}", file=out)
    return status


def cmd_bounds(args, out) -> int:
    (sched,) = _schedules(args, multiple=False)
    try:
        grid = parse_grid(args.snr)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mod = ModulationSpec.from_name(args.mod)
    spec = compute_spectrum(sched, args.dmax)
    if spec.is_empty:
        print(f"{sched.label}: no terms <= dmax={args.dmax}", file=sys.stderr)
        return EXIT_EMPTY
    if args.terms > len(spec):
        raise UsageError(
            f"--terms {args.terms} requested but only {len(spec)} spectrum terms exist at "
            f"--dmax {args.dmax} (short by {args.terms - len(spec)}); raise --dmax"
        )
    query = BoundQuery(spec, grid, mod, args.terms, frame_bits=args.frame_bits if args.fer else 1)
    curve = fer_union_bound(query) if args.fer else bep_union_bound(query)
    values = curve.raw if args.raw else curve.values

    w = csv.writer(out, lineterminator="\n")
    if args.uncoded:
        ref = uncoded_curve(mod.M, grid)
        w.writerow(["ebno_db", "kind", "value"])
        for x, v in zip(grid, values):
            w.writerow([f"{x:g}", curve.kind, _sci(v)])
        for x, v in zip(grid, ref.values):
            w.writerow([f"{x:g}", "uncoded", _sci(v)])
    else:
        w.writerow(["ebno_db", "value"])
        for x, v in zip(grid, values):
            w.writerow([f"{x:g}", _sci(v)])
    return 0


def cmd_simulate(args, out) -> int:
    (sched,) = _schedules(args, multiple=False)
    try:
        grid = parse_grid(args.snr)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    base = SimConfig(
        schedule=sched,
        modulation=ModulationSpec.from_name(args.mod),
        ebno_db=float(grid[0]),
        frame_bits=args.frame_bits,
        seed=args.seed,
        stop=StopRule(args.min_frame_errors, args.min_bit_errors, args.max_frames),
        workers=args.workers,
        interleaver=args.interleaver,
    )
    results = run_sweep(sweep_configs(base, grid))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["ebno_db", "frames", "bits", "bit_errors", "frame_errors", "ber", "fer",
                "ber_ci_lo", "ber_ci_hi", "fer_ci_lo", "fer_ci_hi"])
    for r in results:
        (blo, bhi), (flo, fhi) = r.ber_ci, r.fer_ci
        w.writerow([f"{r.ebno_db:g}", r.frames, r.bits, r.bit_errors, r.frame_errors,
                    _sci(r.ber), _sci(r.fer), _sci(blo), _sci(bhi), _sci(flo), _sci(fhi)])
    return 0


COMMANDS = {"spectrum": cmd_spectrum, "bounds": cmd_bounds, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with contextlib.ExitStack() as stack:
            out = stack.enter_context(open(args.out, "w", newline="")) if args.out else sys.stdout
            return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"bccspec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
