"""Command-line front end.

Exit codes: 0 success, 1 a scientific check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import serialization as ser
from .angular_momentum import SpinSpace, angular_momentum_ops, spin_pair_example
from .counterexample import three_level_example, scan_lambda
from .errors import DimensionError, InputError, MinUncertError
from .gaussian import (
    FockTruncation,
    GaussianParams,
    gaussian_moments_exact,
    mixture_purity_exact,
    gaussian_mixture_example,
    required_fock_dim,
    tail_weight,
)
from .operator_core import SATURATION_TOL, is_pure, uncertainty_report
from .search import SearchConfig, search_saturating_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MIXED_TOL = 1e-9
GAUSSIAN_PURITY_TOL = 1e-8

log = logging.getLogger("minuncert")


class UsageError(Exception):
    pass


@dataclass
class BundleEntry:
    name: str
    inputs: dict
    report: dict
    purity: float
    saturated: bool
    mixed: bool
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.saturated and self.mixed


@dataclass
class VerificationBundle:
    entries: list[BundleEntry]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "examples": [
                {
                    "name": e.name,
                    "inputs": e.inputs,
                    "report": e.report,
                    "purity": e.purity,
                    "saturated": e.saturated,
                    "mixed": e.mixed,
                    "notes": e.notes,
                    "pass": e.passed,
                }
                for e in self.entries
            ],
            "pass": self.passed,
        }


def _entry(name, inputs, a, b, rho, tol, notes=None) -> BundleEntry:
    rep = uncertainty_report(a, b, rho, tol)
    return BundleEntry(
        name=name,
        inputs=inputs,
        report=ser.report_to_dict(rep),
        purity=rep.purity,
        saturated=rep.saturated,
        mixed=not is_pure(rho, MIXED_TOL),
        notes=list(notes or []),
    )


def verify_examples(
    saturation_tol: float = SATURATION_TOL,
    gaussian: GaussianParams | None = None,
    fock_dim: int = 64,
) -> VerificationBundle:
    gaussian = gaussian or GaussianParams()
    entries = []

    a, b, rho = three_level_example()
    entries.append(_entry(
        "three-level",
        {"A": ser.matrix_to_json(a), "B": ser.matrix_to_json(b), "rho": ser.matrix_to_json(rho)},
        a, b, rho, saturation_tol,
    ))

    jx, jy, rho = spin_pair_example()
    entries.append(_entry(
        "angular-momentum",
        {"j_list": ["0", "1"], "A": "Jx", "B": "Jy", "rho": ser.matrix_to_json(rho)},
        jx, jy, rho, saturation_tol,
    ))

    trunc = FockTruncation(n_max=fock_dim)
    a, b, rho = gaussian_mixture_example(gaussian, trunc)
    entry = _entry(
        "gaussian",
        {"a": gaussian.a, "kappa": gaussian.kappa, "hbar": gaussian.hbar, "fock_dim": fock_dim},
        a, b, rho, saturation_tol,
    )
    expected = mixture_purity_exact(gaussian)
    if abs(entry.purity - expected) > GAUSSIAN_PURITY_TOL:
        entry.mixed = False
        entry.notes.append(f"purity {entry.purity:.12g} differs from (1+exp(-2 kappa a^2))/2 = {expected:.12g}")
    if gaussian.a == 0:
        entry.notes.append("pure-degenerate: a = 0 collapses the mixture to the ground state")
    entries.append(entry)
    return VerificationBundle(entries)


def _print_bundle(bundle: VerificationBundle, out=None) -> None:
    out = out or sys.stdout
    head = f"{'example':<18}{'(dA)^2':>14}{'(dB)^2':>14}{'dA*dB':>14}{'bound':>14}{'gap':>12}{'purity':>10}  verdict"
    print(head, file=out)
    print("-" * len(head), file=out)
    for e in bundle.entries:
        r = e.report
        verdict = "PASS" if e.passed else "FAIL"
        flags = []
        if not e.saturated:
            flags.append("not saturated")
        if not e.mixed:
            flags.append("pure")
        if flags:
            verdict += " (" + ", ".join(flags) + ")"
        print(
            f"{e.name:<18}{r['spread_a']**2:>14.10f}{r['spread_b']**2:>14.10f}"
            f"{r['product']:>14.10f}{r['bound']:>14.10f}{r['gap']:>12.2e}{e.purity:>10.6f}  {verdict}",
            file=out,
        )
        for note in e.notes:
            print(f"{'':<18}note: {note}", file=out)
    print(f"overall: {'PASS' if bundle.passed else 'FAIL'}", file=out)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _emit(payload, args) -> None:
    if args.out:
        try:
            ser.dump_json(payload, args.out)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    if args.json:
        print(ser.dump_json(payload))


def _load_pair(args):
    if not args.a or not args.b:
        raise UsageError("--a and --b are required")
    try:
        a = ser.load_observable(args.a)
        b = ser.load_observable(args.b)
    except OSError as exc:
        raise UsageError(f"cannot read matrix file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc
    if a.dim != b.dim:
        raise DimensionError(f"A is {a.dim}x{a.dim} but B is {b.dim}x{b.dim}")
    return a, b


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_verify_examples(args) -> int:
    t0 = time.perf_counter()
    params = GaussianParams(a=args.gaussian_a, kappa=args.kappa, hbar=args.hbar)
    bundle = verify_examples(args.saturation_tol, params, args.fock_dim)
    if not args.json:
        _print_bundle(bundle)
        print(f"elapsed: {time.perf_counter() - t0:.2f} s")
    _emit(bundle.to_dict(), args)
    return EXIT_OK if bundle.passed else EXIT_FAIL


def cmd_find(args) -> int:
    a, b = _load_pair(args)
    lambdas = _parse_floats(args.lam)
    probes = [complex(z) for z in args.probe] if args.probe else []
    families = scan_lambda(a, b, lambdas, saturation_tol=args.saturation_tol, probe_eigenvalues=probes)
    payload = [ser.family_to_dict(f) for f in families]
    if not args.json:
        print(f"{len(families)} saturating famil{'y' if len(families) == 1 else 'ies'}")
        for f in families:
            r = f.report
            kind = "nontrivial" if r.nontrivial else "trivial (both sides vanish)"
            print(
                f"  lambda={f.lam:g}  z={f.eigenvalue.real:.6g}{f.eigenvalue.imag:+.6g}i  "
                f"kernel dim={f.kernel_dim}  product={r.product:.10g}  bound={r.bound:.10g}  "
                f"purity={r.purity:.6g}  {kind}"
            )
    _emit(payload, args)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.seed is None and os.environ.get("CI"):
        raise UsageError("--seed is mandatory when CI is set")
    a, b = _load_pair(args)
    try:
        cfg = SearchConfig(
            rank=args.rank,
            purity_max=args.purity_max,
            max_iters=args.max_iters,
            gap_tol=args.gap_tol,
            seed=0 if args.seed is None else args.seed,
        )
        cfg.validate_for(a.dim)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    result = search_saturating_state(a, b, cfg, args.saturation_tol)
    payload = ser.result_to_dict(result, cfg)
    if not args.json:
        r = result.report
        print(
            f"converged={result.converged} iterations={result.iterations} method={result.method}\n"
            f"  product={r.product:.10g} bound={r.bound:.10g} gap={r.gap:.3e} purity={r.purity:.6g} "
            f"nontrivial={r.nontrivial}"
        )
    _emit(payload, args)
    return EXIT_OK


def cmd_gaussian(args) -> int:
    params = GaussianParams(a=args.gaussian_a, kappa=args.kappa, hbar=args.hbar)
    fock_dim = args.fock_dim or required_fock_dim(params)
    trunc = FockTruncation(n_max=fock_dim)
    exact = gaussian_moments_exact(params)
    a, b, rho = gaussian_mixture_example(params, trunc)
    rep = uncertainty_report(a, b, rho, args.saturation_tol)
    payload = {
        "params": {"a": params.a, "kappa": params.kappa, "hbar": params.hbar},
        "fock_dim": fock_dim,
        "tail_weight": tail_weight(params, trunc),
        "exact": {k: v.to_dict() for k, v in exact.items()},
        "fock_report": ser.report_to_dict(rep),
        "purity_exact": mixture_purity_exact(params),
    }
    if not args.json:
        mix = exact["mixture"]
        print(f"a={params.a:g} kappa={params.kappa:g} hbar={params.hbar:g} fock_dim={fock_dim}")
        print(f"{'':<10}{'<A>':>12}{'<B>':>12}{'dA*dB':>14}{'bound':>14}{'purity':>12}")
        print(f"{'exact':<10}{mix.mean_a:>12.8f}{mix.mean_b:>12.8f}{mix.product:>14.10f}{mix.bound:>14.10f}"
              f"{payload['purity_exact']:>12.8f}")
        print(f"{'fock':<10}{rep.mean_a:>12.8f}{rep.mean_b:>12.8f}{rep.product:>14.10f}{rep.bound:>14.10f}"
              f"{rep.purity:>12.8f}")
    _emit(payload, args)
    return EXIT_OK


def cmd_spin(args) -> int:
    space = SpinSpace(_parse_j(args.j))
    jx, jy, jz = angular_momentum_ops(space)
    payload = {
        "Jx": ser.matrix_to_json(jx),
        "Jy": ser.matrix_to_json(jy),
        "Jz": ser.matrix_to_json(jz),
        "labels": space.label_table(),
    }
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for name in ("Jx", "Jy", "Jz"):
                ser.dump_json(payload[name], out / f"{name}.json")
            ser.dump_json(payload["labels"], out / "labels.json")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    if args.json or not args.out:
        print(ser.dump_json(payload))
    return EXIT_OK


def _parse_j(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minuncert",
        description="Audit the Heisenberg-Robertson relation and find mixed states that saturate it.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gaussian=False, pair=False):
        p.add_argument("--saturation-tol", type=float, default=SATURATION_TOL)
        p.add_argument("--out", help="write JSON output to this path")
        p.add_argument("--json", action="store_true", help="print JSON instead of a table")
        if gaussian:
            p.add_argument("--gaussian-a", type=float, default=1.0)
            p.add_argument("--kappa", type=float, default=1.0)
            p.add_argument("--hbar", type=float, default=1.0)
        if pair:
            p.add_argument("--a", help="matrix JSON file for A")
            p.add_argument("--b", help="matrix JSON file for B")

    p = sub.add_parser(
        "verify-examples", aliases=["verify-paper"], help="reproduce the three saturating mixed-state examples"
    )
    common(p, gaussian=True)
    p.add_argument("--fock-dim", type=int, default=64)
    p.set_defaults(func=cmd_verify_examples)

    p = sub.add_parser("find", help="saturating families from degenerate eigenspaces of A + i*lambda*B")
    common(p, pair=True)
    p.add_argument("--lambda", dest="lam", default="1", help="comma-separated lambda grid")
    p.add_argument("--probe", action="append", help="extra candidate eigenvalue, e.g. -1j (repeatable)")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("search", help="optimize directly over rank-capped mixed states")
    common(p, pair=True)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--purity-max", type=float, default=0.9)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("gaussian", help="moment table for the two-Gaussian mixture")
    common(p, gaussian=True)
    p.add_argument("--fock-dim", type=int, default=None)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("spin", help="export angular-momentum matrices")
    p.add_argument("--j", default="0,1", help="comma-separated j values, e.g. 0,1 or 1/2")
    p.add_argument("--out", help="directory for Jx.json, Jy.json, Jz.json and labels.json")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spin)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MinUncertError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
