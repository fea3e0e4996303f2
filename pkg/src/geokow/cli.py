"""``geokow`` command line.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 numeric singularity abort.
"""
from __future__ import annotations

import argparse
import logging
import os
import random
import sys
import time
from fractions import Fraction
from typing import Dict, Optional, Sequence

from . import report as rp
from . import suites as su
from .dynamics import IntegrationError, SingularStateError
from .pencil import PencilSpec, kowalevski_spec

log = logging.getLogger("geokow")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SINGULAR = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class ConfigError(ValueError):
    pass


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--spec", help="pencil coefficients a0,a1,a2,a3,a4,a5 (rationals)")
    src.add_argument("--kowalevski", help="Kowalevski constants l1,l,c,k")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=_positive(int), default=None)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    dyn = argparse.ArgumentParser(add_help=False)
    dyn.add_argument("--ab", choices=("kowalevski", "A", "B", "C"), default="kowalevski")
    dyn.add_argument("--tau", type=int, choices=(-1, 0, 1), default=None)
    dyn.add_argument("--T", type=_positive(float), default=1.0)
    dyn.add_argument("--rtol", type=_positive(float), default=1e-10)
    dyn.add_argument("--atol", type=_positive(float), default=1e-12)

    p = argparse.ArgumentParser(prog="geokow", description="Pencils of conics, discriminantly "
                                "separable polynomials and Kowalevski-type systems.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("pencil", parents=[common], help="pencil polynomials and exact identities")
    sub.add_parser("sep", parents=[common], help="discriminant separability suite")
    sub.add_parser("dyn", parents=[common, dyn], help="integrate and check first integrals")
    sub.add_parser("kotter", parents=[common], help="Kötter transformation suite")
    g = sub.add_parser("group", parents=[common], help="two-valued group suite")
    g.add_argument("--assoc", action="store_true", help="include associativity")
    g.add_argument("--triples", type=_positive(int), default=100)
    pc = sub.add_parser("poncelet", parents=[common], help="Poncelet triangle closure")
    pc.add_argument("--pencils", type=_positive(int), default=10)
    sub.add_parser("verify-all", parents=[common, dyn], help="every suite")
    return p


def _spec(args, required: bool = True) -> Optional[PencilSpec]:
    try:
        if args.spec:
            return PencilSpec.parse(args.spec)
        if args.kowalevski:
            parts = [Fraction(t.strip()) for t in args.kowalevski.split(",")]
            if len(parts) != 4:
                raise ConfigError("--kowalevski needs l1,l,c,k")
            return kowalevski_spec(*parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid spec: {exc}") from None
    if required:
        raise ConfigError("a pencil is required: pass --spec or --kowalevski")
    return None


def _config(args) -> Dict[str, object]:
    return {k: v for k, v in vars(args).items() if k not in ("out", "format")}


def run(args) -> su.SuiteResult:
    rng = random.Random(args.seed)
    cmd = args.command
    n = args.samples
    if cmd == "pencil":
        spec = _spec(args)
        res = su.pencil_suite(spec, rng, n or 20)
    elif cmd == "sep":
        res = su.sep_suite(_spec(args, False) or su.DEFAULT_SPEC, rng, n or 50)
    elif cmd == "dyn":
        res = su.dyn_suite(rng, args.ab, _spec(args, False), args.tau, n or 20, args.T, args.rtol, args.atol)
    elif cmd == "kotter":
        spec = _spec(args, False) or su.DEFAULT_SPEC
        if spec.a0 != -2:
            raise ConfigError("normalization required: a0 = -2")
        res = su.kotter_suite(spec, rng, n or 20)
    elif cmd == "group":
        res = su.group_suite(_spec(args, False) or su.DEFAULT_SPEC, rng, n or 100, args.triples, args.assoc)
    elif cmd == "poncelet":
        res = su.poncelet_suite(rng, n or 20, args.pencils, _spec(args, False))
    else:
        res = verify_all(args, rng)
    return res


def verify_all(args, rng: random.Random) -> su.SuiteResult:
    spec = _spec(args, False) or su.DEFAULT_SPEC
    n = args.samples or 50
    res = su.SuiteResult()
    res.extend(su.pencil_suite(spec, rng, n))
    ok_disc = ok_jac = True
    for _ in range(n):
        rs = su.random_spec(rng)
        sub = su.pencil_suite(rs, rng, 1)
        ok_disc &= all(c.verdict == "pass" for c in sub.checks if c.name.startswith("pencil.discriminant"))
        ok_jac &= all(c.verdict == "pass" for c in sub.checks if c.name == "pencil.jacobi_identity")
    res.add("pencil.random_specs.discriminants", ok_disc, count=n)
    res.add("pencil.random_specs.jacobi", ok_jac, count=n)
    res.extend(su.sep_suite(spec, rng, n))
    res.extend(su.dyn_structural(rng, n))
    res.extend(su.dyn_choices(rng, min(n, 20), args.T, args.rtol, args.atol))
    res.extend(su.dyn_families(rng, min(n, 20), args.T, args.rtol, args.atol))
    kspec = spec if spec.a0 == -2 else su.DEFAULT_SPEC
    res.extend(su.kotter_suite(kspec, rng, n))
    res.extend(su.group_suite(spec, rng, max(n, 100), max(n, 100), True))
    res.extend(su.poncelet_suite(rng, 20, 10))
    return res


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = LOG_LEVELS.get(os.environ.get("GEOKOW_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        res = run(args)
    except ConfigError as exc:
        print(f"geokow: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularStateError, IntegrationError) as exc:
        print(f"geokow: numeric abort: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    report = rp.build_report(args.command, _config(args), res, time.perf_counter() - t0)
    if args.format == "csv":
        traj = res.data.get("trajectory")
        text = rp.trajectory_csv(traj) if traj is not None else rp.checks_csv(report)
    else:
        text = rp.dumps(report)
    _emit(text, args.out)
    for c in report["checks"]:
        if c["verdict"] == "fail":
            log.warning("check failed: %s", c["name"])
    return EXIT_FAIL if res.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
