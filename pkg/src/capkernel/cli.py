"""Command line entry point.

Exit codes: 0 success, 1 parse or validation failure, 2 exactness or
expectation failure, 3 resource ceiling reached.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import report as rpt
from .errors import (CapkernelError, ExactnessFailure, InternalOverflow, ParseError,
                     PrecisionExhausted, ValidationError)
from .fixtures import BuildOptions, build_covering, bundled_fixture, parse_file

EXIT_OK, EXIT_VALIDATION, EXIT_EXACTNESS, EXIT_RESOURCE = 0, 1, 2, 3
COMMANDS = ("validate", "classgroup", "units", "capitulation", "cohomology", "verify-sequence")


def resolve_fixture(arg):
    p = Path(arg)
    if p.exists():
        return p
    bundled = bundled_fixture(arg)
    if bundled.exists():
        return bundled
    return p


def _prime_data(P):
    return {"p": P.p, "generator": rpt.element_data(P.generator), "e": P.e, "f": P.f}


def _classgroup_section(cl):
    return {"group": rpt.group_data(cl.group),
            "factor_base": [_prime_data(P) for P in cl.factor_base],
            "relations": [list(r) for r in cl.relations],
            "sigma": [_prime_data(P) for P in cl.sigma]}


def _units_section(U):
    return {"w": U.w, "torsion_generator": rpt.element_data(U.zeta), "rank": U.rank,
            "free_generators": [rpt.element_data(u) for u in U.free]}


def _cohomology_section(cov):
    from .capitulation import roots_of_unity, unit_module
    from .cohom import cech_complex_split, cohomology
    mu = roots_of_unity(cov)
    UK = unit_module(cov)
    out = {}
    for name, M in (("mu_n", mu.module), ("units_K", UK)):
        out[name] = {"H1": rpt.group_data(cohomology(M, 1).group),
                     "H2": rpt.group_data(cohomology(M, 2).group),
                     "cech_agrees": all(r.ok for r in cech_complex_split(M).values())}
    out["mu_n"]["order"] = mu.m
    return out


def _capitulation_section(cov):
    from .capitulation import capitulation_kernel
    cap = capitulation_kernel(cov)
    return {"j": rpt.hom_data(cap.j), "kernel": rpt.group_data(cap.kernel),
            "kernel_invariants": list(cap.kernel.invariants),
            "killed_by_n": cap.killed_by_n,
            "witnesses": [{"class_vector": list(v), "generator": rpt.element_data(x)}
                          for v, x in zip(cap.generator_vectors, cap.witnesses)]}


def run_command(cmd, path, options, fmt="text"):
    """Run one command on one fixture; returns (exit code, stdout bytes, stderr text)."""
    try:
        fx = parse_file(path)
        cov = build_covering(fx, options)
    except ParseError as exc:
        return EXIT_VALIDATION, b"", f"parse error: {exc}"
    except ValidationError as exc:
        first = exc.failures[0] if exc.failures else str(exc)
        if cmd == "validate":
            data = {"fixture": str(path), "command": cmd,
                    "validation": {"passed": False, "failures": list(exc.failures)},
                    "computation": {}, "provenance": rpt.provenance_data(options.seed, 0, options)}
            return EXIT_VALIDATION, rpt.emit_report(data, fmt), f"validation failed: {first}"
        return EXIT_VALIDATION, b"", f"validation failed: {first}"
    except (PrecisionExhausted, InternalOverflow) as exc:
        return EXIT_RESOURCE, b"", f"resource ceiling: {exc}"

    precision = max(cov.units_F.max_precision_used, cov.units_K.max_precision_used)
    try:
        if cmd == "verify-sequence":
            from .capitulation import verify_sequence
            rep = verify_sequence(cov, strict=False)
            data = rpt.sequence_data(rep, options)
            fails = rep.failures()
            code = EXIT_EXACTNESS if fails else EXIT_OK
            return code, rpt.emit_report(data, fmt), (f"failure: {fails[0]}" if fails else "")
        comp = {}
        code, err = EXIT_OK, ""
        if cmd == "classgroup":
            comp = {"F": _classgroup_section(cov.class_F), "K": _classgroup_section(cov.class_K)}
        elif cmd == "units":
            comp = {"F": _units_section(cov.units_F), "K": _units_section(cov.units_K)}
        elif cmd == "capitulation":
            comp = _capitulation_section(cov)
            if not comp["killed_by_n"]:
                code, err = EXIT_EXACTNESS, "failure: Ker j is not killed by n"
        elif cmd == "cohomology":
            comp = _cohomology_section(cov)
        comp["n"] = cov.n
        data = {"fixture": cov.name, "command": cmd,
                "validation": rpt.validation_data(cov.validation),
                "computation": comp,
                "provenance": rpt.provenance_data(cov.seed, precision, options)}
        return code, rpt.emit_report(data, fmt), err
    except (PrecisionExhausted, InternalOverflow) as exc:
        return EXIT_RESOURCE, b"", f"resource ceiling: {exc}"
    except ExactnessFailure as exc:
        return EXIT_EXACTNESS, b"", f"exactness failure at node {exc.node}: {exc}"
    except CapkernelError as exc:
        return EXIT_EXACTNESS, b"", f"{type(exc).__name__}: {exc}"


def _job(args):
    cmd, path, options, fmt = args
    return run_command(cmd, path, options, fmt)


def build_parser():
    ap = argparse.ArgumentParser(prog="capkernel",
                                 description="Capitulation kernels and their five-term sequence.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("fixtures", nargs="+", help="fixture path or bundled fixture name")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--height-bound", type=int, default=BuildOptions.height)
    ap.add_argument("--precision-ceiling", type=int, default=BuildOptions.precision_ceiling)
    ap.add_argument("--format", choices=("text", "structured"), default="text")
    ap.add_argument("--batch", action="store_true",
                    help="process several fixtures concurrently, one process each")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if len(args.fixtures) > 1 and not args.batch:
        print("several fixtures need --batch", file=sys.stderr)
        return EXIT_VALIDATION
    options = BuildOptions(height=args.height_bound, precision_ceiling=args.precision_ceiling,
                           seed=args.seed)
    jobs = [(args.command, resolve_fixture(f), options, args.format) for f in args.fixtures]
    if args.batch and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    worst = EXIT_OK
    for code, out, err in results:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
        if err:
            print(err, file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
