"""Command-line front end: certificate-emitting, deterministic pipelines.

Commands print their report (JSON, or CSV for the c_l table) to stdout and
optionally write it to --out.  Every emitted certificate is re-checked
in-process by the same verifier behind the `verify` command before the
process exits 0.  Exit codes: 0 verified, 1 verification failure (or an
outcome with no witness), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bodies import load_body
from .eutaxy import classification_certificate
from .harmonic import certify_c_range, zonal_spectrum
from .lattice import build_anstar, covering_radius, lattice_report, voronoi_vertices
from .perturbation import (
    WitnessSearchError,
    WitnessUnavailableError,
    extension_witness,
    rotation_scan,
)
from .reports import (
    cl_csv,
    dump_json,
    scan_certificate,
    spectrum_certificate,
    verify_certificate,
    verify_cl_csv,
    witness_certificate,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from e


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ballcover",
        description="Exact certificates for ball covering geometry in dimensions 2-5.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_out(sp):
        sp.add_argument("--out", help="also write the report to this path")

    sp = sub.add_parser("ball-class", help="classify the A_n* simplex maps")
    sp.add_argument("--dim", type=int, choices=(2, 3, 4, 5), required=True)
    add_out(sp)

    sp = sub.add_parser("anstar", help="report the A_n* lattice model")
    sp.add_argument("--dim", type=int, choices=(2, 3, 4, 5), required=True)
    add_out(sp)

    sp = sub.add_parser("construct", help="covering lattice for a perturbed ball")
    sp.add_argument("--body", required=True, help="body JSON file")
    sp.add_argument("--grid", type=_positive_int, default=1000)
    add_out(sp)

    sp = sub.add_parser("witness", help="exact inextensibility witness")
    sp.add_argument("--dim", type=int, choices=(2, 3, 4, 5), required=True)
    sp.add_argument("--pair", type=_nonneg_int, required=True)
    sp.add_argument("--eps", type=_rational, default=Fraction(1, 100))
    add_out(sp)

    sp = sub.add_parser("cl-certify", help="certify c_l nonvanishing up to lmax")
    sp.add_argument("--lmax", type=_nonneg_int, required=True)
    add_out(sp)

    sp = sub.add_parser("zonal", help="multiplier spectrum of the vertex measure")
    sp.add_argument("--lmax", type=_nonneg_int, required=True)
    add_out(sp)

    sp = sub.add_parser("verify", help="re-check a certificate file")
    sp.add_argument("--certificate", required=True)
    return p


def _finish(text: str, out: str | None, ok: bool, failures: list[str]) -> int:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if not ok:
        for msg in failures:
            print(f"verification failure: {msg}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _emit_json(cert: dict, out: str | None) -> int:
    text = dump_json(cert)
    ok, failures = verify_certificate(json.loads(text))
    return _finish(text, out, ok, failures)


def cmd_ball_class(args) -> int:
    cert = classification_certificate(build_anstar(args.dim))
    print(f"dimension: {args.dim}")
    print(f"classification: {cert['classification']}")
    print(f"conclusion: {cert['conclusion']}")
    text = dump_json(cert)
    ok, failures = verify_certificate(json.loads(text))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if not ok:
        for msg in failures:
            print(f"verification failure: {msg}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_anstar(args) -> int:
    return _emit_json(lattice_report(build_anstar(args.dim)), args.out)


def cmd_construct(args) -> int:
    try:
        body = load_body(args.body)
    except (OSError, ValueError, KeyError) as e:
        print(f"usage error: cannot load body: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = rotation_scan(body, grid_size=args.grid)
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return _emit_json(scan_certificate(body, report), args.out)


def cmd_witness(args) -> int:
    lat = build_anstar(args.dim)
    try:
        w = extension_witness(lat, args.pair, eps=args.eps)
    except WitnessUnavailableError as e:
        print(f"no witness: {e}", file=sys.stderr)
        return EXIT_FAIL
    except WitnessSearchError as e:
        print(f"search failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, AssertionError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return _emit_json(witness_certificate(w), args.out)


def cmd_cl_certify(args) -> int:
    text = cl_csv(certify_c_range(args.lmax))
    ok, failures = verify_cl_csv(text)
    return _finish(text, args.out, ok, failures)


def cmd_zonal(args) -> int:
    lat = build_anstar(3)
    points = voronoi_vertices(lat)
    _, simplices = covering_radius(lat)
    pole = simplices[0].x[0]
    spec = zonal_spectrum(points, pole, lat.gram, args.lmax)
    return _emit_json(spectrum_certificate(spec), args.out)


def cmd_verify(args) -> int:
    try:
        with open(args.certificate) as fh:
            text = fh.read()
    except OSError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if text.startswith("l,c_l,"):
        ok, failures = verify_cl_csv(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            print(f"verification failure: not JSON or c_l CSV: {e}", file=sys.stderr)
            return EXIT_FAIL
        ok, failures = verify_certificate(data)
    if ok:
        print("verified")
        return EXIT_OK
    for msg in failures:
        print(f"verification failure: {msg}", file=sys.stderr)
    return EXIT_FAIL


_COMMANDS = {
    "ball-class": cmd_ball_class,
    "anstar": cmd_anstar,
    "construct": cmd_construct,
    "witness": cmd_witness,
    "cl-certify": cmd_cl_certify,
    "zonal": cmd_zonal,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
