"""Command-line front end.

Coefficients are given constant term first: ``--coeffs a0,a1,...,a_{2g+2}``.
Exit status: 0 when the result is decided, 2 when it is undecided or the
estimate is flagged, 1 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import ctgroup, density
from .locsolve import UNDECIDED, Curve, deficient_at_finite, deficient_at_infinity
from .parity import parity

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac_str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def _emit(payload: dict, as_json: bool, text: str, out):
    if as_json:
        out.write(json.dumps(_jsonable(payload), sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _coeffs(args) -> tuple:
    if args.coeffs is None:
        raise UsageError("--coeffs is required")
    try:
        cs = tuple(int(t) for t in args.coeffs.split(","))
    except ValueError:
        raise UsageError(f"--coeffs must be comma-separated integers, got {args.coeffs!r}")
    if len(cs) != 2 * args.genus + 3:
        raise UsageError(f"genus {args.genus} needs {2 * args.genus + 3} coefficients (a0 first), got {len(cs)}")
    return cs


def _curve(args) -> Curve:
    try:
        return Curve(args.genus, _coeffs(args))
    except ValueError as e:
        raise UsageError(str(e))


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for this command")


# -- commands ----------------------------------------------------------------------

def cmd_curve(args, out) -> int:
    c = _curve(args)
    if args.action == "parity":
        rep = parity(c, args.factor_mode)
        d = rep.to_dict()
        d["N"] = d.pop("n")
        text = (f"verdict: {rep.verdict}\nN: {rep.N}\n<c,c>: {rep.pairing_value}\n"
                f"deficient places: {', '.join(rep.deficient_places) or 'none'}")
        for note in rep.notes:
            text += f"\nnote: {note}"
        _emit(d, args.json, text, out)
        return EXIT_UNDECIDED if rep.verdict == UNDECIDED else EXIT_OK
    _need(args, "p")
    if args.p == "inf":
        v = deficient_at_infinity(c)
    else:
        try:
            p = int(args.p)
        except ValueError:
            raise UsageError("--p must be a prime or 'inf'")
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise UsageError(f"--p {p} is not prime")
        v = deficient_at_finite(c, p, cap=args.precision_cap)
    _emit(v.to_dict(), args.json, f"place {v.place}: {v.decision}", out)
    return EXIT_UNDECIDED if v.decision == UNDECIDED else EXIT_OK


def _estimate_out(est, args, out, label):
    text = f"{label} = {est.value:.6g} +- {est.std_error:.2g} (n={est.n_samples}, undecided={est.n_undecided})"
    if est.flagged:
        text += " [flagged]"
    _emit(est.to_dict(), args.json, text, out)
    return EXIT_UNDECIDED if est.flagged else EXIT_OK


def cmd_density(args, out) -> int:
    a = args.action
    if a in ("s-inf", "s-p", "q-n", "rho", "rho-direct"):
        _need(args, "samples", "seed")
        if args.samples < 1:
            raise UsageError("--samples must be positive")
    if a == "s-inf":
        return _estimate_out(density.estimate_s_inf(args.genus, args.samples, args.seed), args, out,
                             f"s_{{{args.genus},inf}}")
    if a == "s-p":
        _need(args, "p")
        p = int(args.p)
        est = density.estimate_s_p(args.genus, p, args.samples, args.seed, cap=args.precision_cap)
        return _estimate_out(est, args, out, f"s_{{{args.genus},{p}}}")
    if a == "q-n":
        _need(args, "degree")
        return _estimate_out(density.estimate_q_n(args.degree, args.samples, args.seed), args, out,
                             f"q_{args.degree}")
    if a == "rho":
        table = density.build_table(args.genus, args.prime_bound, args.seed, n_inf=10 * args.samples,
                                    n_2=args.samples, n_odd=args.samples)
        lo, hi = density.rho_interval(args.genus, table)
        flagged = any(isinstance(e, density.Estimate) and e.flagged for e in table.s_p.values())
        d = {"rho_lower": lo, "rho_upper": hi, "rho_lower_float": float(lo), "rho_upper_float": float(hi),
             "table": table.to_dict(), "flagged": flagged}
        _emit(d, args.json, f"rho_{args.genus} in [{float(lo):.5f}, {float(hi):.5f}]", out)
        return EXIT_UNDECIDED if flagged else EXIT_OK
    if a == "rho-direct":
        _need(args, "height")
        est, hist = density.estimate_rho_direct(args.genus, args.height, args.samples, args.seed,
                                                args.factor_mode)
        d = est.to_dict()
        d["histogram"] = {",".join(k) or "none": v for k, v in sorted(hist.items())}
        text = f"rho_{args.genus} ~ {est.value:.5f} +- {est.std_error:.2g}"
        _emit(d, args.json, text, out)
        return EXIT_UNDECIDED if est.flagged else EXIT_OK
    if a == "eta":
        _need(args, "j")
        if args.j < 1:
            raise UsageError("--j must be positive")
        v = density.eta(args.j)
        _emit({"j": args.j, "eta": v}, args.json, _frac_str(v), out)
        return EXIT_OK
    if a == "coprime":
        _need(args, "p", "m", "n")
        p = int(args.p)
        v = density.coprime_probability(p, args.m, args.n)
        _emit({"p": p, "m": args.m, "n": args.n, "probability": v}, args.json, _frac_str(v), out)
        return EXIT_OK
    if a == "bounds":
        _need(args, "p")
        p = int(args.p)
        if args.genus % 2 or args.genus < 2 or p == 2:
            raise UsageError("bounds need even genus >= 2 and an odd prime")
        lo, hi = density.prop17_bounds(args.genus, p)
        d = {"genus": args.genus, "p": p, "lower": lo, "upper": hi}
        text = f"{_frac_str(lo)} <= s_{{{args.genus},{p}}} <= {_frac_str(hi)}"
        if args.genus == 2:
            rlo, rhi = density.refined_genus2_bounds(p)
            d.update(refined_lower=rlo, refined_upper=rhi)
            text += f"\nrefined: {_frac_str(rlo)} <= s <= {_frac_str(rhi)}"
        _emit(d, args.json, text, out)
        return EXIT_OK
    raise UsageError(f"unknown density command {a}")


def _group_text(T) -> str:
    return " x ".join(f"Z/{n}" for n in T) if T else "1"


def cmd_group(args, out) -> int:
    if args.action == "check":
        _need(args, "file")
        try:
            with open(args.file) as fh:
                pg = ctgroup.PairedGroup.from_dict(json.load(fh))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise UsageError(f"cannot read paired group from {args.file}: {e}")
        val = ctgroup.validate(pg)
        if not val.ok:
            d = {"valid": False, "violation": val.to_dict()}
            _emit(d, args.json, f"invalid: {val.axiom}: {val.detail}", out)
            return EXIT_OK
        kind, cc = ctgroup.parity_of(pg)
        wit = ctgroup.decompose(pg)
        d = {"valid": True, "parity": kind, "pairing_value": cc, "T": _group_text(wit.T),
             "decomposition": wit.to_dict()}
        _emit(d, args.json, f"parity: {kind}\n<c,c> = {cc}\nT = {_group_text(wit.T)}", out)
        return EXIT_OK
    # enumerate
    rows = []
    for pg in ctgroup.enumerate_paired_groups(args.order_bound, args.c_options, seed=args.seed or 0):
        kind, _ = ctgroup.parity_of(pg)
        rows.append({**pg.to_dict(), "parity": kind})
    if args.json:
        out.write(json.dumps(_jsonable({"groups": rows}), sort_keys=True) + "\n")
    else:
        for r in rows:
            out.write(f"{r['invariant_factors']} c={r['c']} {r['parity']}\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oddjac", description="Parity of Jacobians of hyperelliptic curves and related densities")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit a JSON record")
        sp.add_argument("--genus", type=int, default=2)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--p")
        sp.add_argument("--precision-cap", type=int, default=1 << 14)
        sp.add_argument("--factor-mode", choices=("heuristic", "rigorous"), default="heuristic")

    cp = sub.add_parser("curve", help="analyse one curve y^2 = f(x)")
    cp.add_argument("action", choices=("parity", "deficient"))
    cp.add_argument("--coeffs", help="a0,a1,...,a_{2g+2} (constant term first)")
    common(cp)

    dp = sub.add_parser("density", help="local and global densities")
    dp.add_argument("action", choices=("s-inf", "s-p", "q-n", "rho", "rho-direct", "eta", "coprime", "bounds"))
    common(dp)
    dp.add_argument("--prime-bound", type=int, default=100)
    dp.add_argument("--height", type=int)
    dp.add_argument("--degree", type=int)
    dp.add_argument("--j", type=int)
    dp.add_argument("--m", type=int)
    dp.add_argument("--n", type=int)

    gp = sub.add_parser("group", help="finite groups with a pairing")
    gp.add_argument("action", choices=("check", "enumerate"))
    gp.add_argument("--file")
    gp.add_argument("--order-bound", type=int, default=16)
    gp.add_argument("--c-options", choices=("any", "zero", "nonzero"), default="any")
    gp.add_argument("--json", action="store_true")
    gp.add_argument("--seed", type=int)
    return parser


def _join_negative_values(argv):
    """Let ``--coeffs -1,2,...`` through: argparse would read -1,... as a flag."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--coeffs", "--p") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse usage errors and --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.command == "curve":
            return cmd_curve(args, out)
        if args.command == "density":
            return cmd_density(args, out)
        return cmd_group(args, out)
    except UsageError as e:
        sys.stderr.write(f"oddjac: error: {e}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())
