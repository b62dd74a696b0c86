"""Batch command-line front end.

Subcommands synthesize witnesses and certificates, verify certificate
files, and run the randomized self-test suites.  Every command prints a
short human-readable summary and emits a JSON artifact (to stdout, or
to --out).  Exit codes: 0 success, 1 precondition violation,
2 malformed input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from functools import reduce

from .backends import compare_clopen, source_range
from .certificates import (Environment, commutator_in_normal_closure,
                           dump_certificate, load_certificate,
                           verify_certificate)
from .decompose import decompose_small_support, split_nontrivial_support
from .elements import commutator, compose, identity, image_of_clopen, support
from .encoding import (format_bisection, format_clopen, format_element,
                       parse_backend, parse_clopen, parse_element)
from .errors import FullGroupError, MalformedInput, PreconditionError
from .selftest import SUITES, RunConfig, run_selftest
from .transfers import (exact_swap_involution, full_group_transfer,
                        commutator_transfer, gw_intertwining)

EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_MALFORMED = 2
EXIT_VERIFY = 3

FORMAT_VERSION = 1


def _emit(artifact: dict, summary: list[str], out_path: str | None) -> None:
    for line in summary:
        print(line)
    artifact = {"format_version": FORMAT_VERSION, **artifact}
    text = json.dumps(artifact, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"artifact written to {out_path}")
    else:
        print(text, end="")


def _backend_and_sets(args, *names):
    backend = parse_backend(args.backend)
    sets = []
    for name in names:
        A = parse_clopen(getattr(args, name))
        if A.base != backend.base:
            raise MalformedInput(
                f"clopen base {A.base} does not match backend {backend.tag}")
        sets.append(A)
    return backend, sets


def _cmd_compare(args) -> None:
    backend, (A, B) = _backend_and_sets(args, "A", "B")
    witness = compare_clopen(backend, A, B)
    src, dst = source_range(witness)
    _emit({"command": "compare",
           "backend": backend.tag,
           "input": {"A": format_clopen(A), "B": format_clopen(B)},
           "witness": format_bisection(witness),
           "source": format_clopen(src),
           "range": format_clopen(dst)},
          [f"compare {format_clopen(A)} -> {format_clopen(B)}",
           f"  witness  {format_bisection(witness)}",
           f"  source   {format_clopen(src)}",
           f"  range    {format_clopen(dst)}"],
          args.out)


def _cmd_transfer(args) -> None:
    backend, (A, B) = _backend_and_sets(args, "A", "B")
    if args.commutator:
        result = commutator_transfer(backend, A, B)
    else:
        result = full_group_transfer(backend, A, B)
    elem = result.element
    _emit({"command": "transfer",
           "backend": backend.tag,
           "commutator": bool(args.commutator),
           "input": {"A": format_clopen(A), "B": format_clopen(B)},
           "element": format_element(elem),
           "postcondition_tag": result.postcondition_tag,
           "image": format_clopen(image_of_clopen(elem, A)),
           "support": format_clopen(support(elem))},
          [f"transfer {format_clopen(A)} -> {format_clopen(B)}"
           + (" (commutator)" if args.commutator else ""),
           f"  element  {format_element(elem)}",
           f"  tag      {result.postcondition_tag}"],
          args.out)


def _cmd_swap(args) -> None:
    backend, (A, B) = _backend_and_sets(args, "A", "B")
    elem = exact_swap_involution(backend, A, B)
    _emit({"command": "swap",
           "backend": backend.tag,
           "input": {"A": format_clopen(A), "B": format_clopen(B)},
           "element": format_element(elem),
           "support": format_clopen(support(elem))},
          [f"swap {format_clopen(A)} <-> {format_clopen(B)}",
           f"  element  {format_element(elem)}"],
          args.out)


def _cmd_gw(args) -> None:
    backend, (A, B) = _backend_and_sets(args, "A", "B")
    state = gw_intertwining(backend, A, B, args.rounds)
    _emit({"command": "gw",
           "backend": backend.tag,
           "input": {"A": format_clopen(A), "B": format_clopen(B)},
           "rounds": state.round,
           "partial": format_element(state.partial),
           "residual_a": format_clopen(state.residual_a),
           "residual_b": format_clopen(state.residual_b),
           "anchor_a": str(state.anchor_a),
           "anchor_b": str(state.anchor_b)},
          [f"gw {format_clopen(A)} <-> {format_clopen(B)} rounds={state.round}",
           f"  residual_a {format_clopen(state.residual_a)}",
           f"  residual_b {format_clopen(state.residual_b)}"],
          args.out)


def _parse_eps(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad epsilon {text!r}: {exc}") from exc


def _cmd_decompose(args) -> None:
    elem = parse_element(args.elem)
    eps = _parse_eps(args.eps) if args.eps else None
    result = decompose_small_support(elem, eps)
    product = reduce(compose, result.factors, identity(elem.backend))
    ok = product == elem
    _emit({"command": "decompose",
           "backend": elem.backend.tag,
           "input": format_element(elem),
           "epsilon": str(result.epsilon) if result.epsilon is not None else None,
           "factors": [format_element(f) for f in result.factors],
           "bounds": [format_clopen(b) for b in result.bounds],
           "reconstructs": ok},
          [f"decompose {format_element(elem)}",
           f"  factors {len(result.factors)}  reconstructs={ok}"],
          args.out)


def _cmd_split(args) -> None:
    elem = parse_element(args.elem)
    result = split_nontrivial_support(elem)
    _emit({"command": "split",
           "backend": elem.backend.tag,
           "input": format_element(elem),
           "tau1": format_element(result.tau1),
           "tau2": format_element(result.tau2),
           "certificate": {
               "generator": result.certificate.generator,
               "factors": [{"conjugator": [[n, e] for n, e in f.conjugator.tokens],
                            "sign": f.sign} for f in result.certificate.factors],
               "environment": {n: format_element(e) for n, e in result.environment.items()},
           },
           "trace": result.trace},
          [f"split {format_element(elem)}",
           f"  tau1 {format_element(result.tau1)}",
           f"  tau2 {format_element(result.tau2)}"],
          args.out)


def _cmd_certify(args) -> None:
    tau0 = parse_element(args.tau0)
    alpha = parse_element(args.alpha)
    beta = parse_element(args.beta)
    if alpha.backend != tau0.backend or beta.backend != tau0.backend:
        raise MalformedInput("all three elements must live on the same backend")
    env = Environment(tau0.backend, {"tau0": tau0, "alpha": alpha, "beta": beta})
    trace: dict = {}
    cert = commutator_in_normal_closure("alpha", "beta", "tau0", env, trace)
    target = commutator(alpha, beta)[0]
    text = dump_certificate(cert, env, target, trace)
    summary = [f"certify [alpha, beta] in normal closure of tau0 ({tau0.backend.tag})",
               f"  factors {len(cert.factors)}"]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        summary.append(f"certificate written to {args.out}")
        for line in summary:
            print(line)
    else:
        for line in summary:
            print(line)
        print(text, end="")


def _cmd_verify(args) -> None:
    with open(args.certfile, "r", encoding="utf-8") as fh:
        text = fh.read()
    cert, env, target = load_certificate(text)
    ok = verify_certificate(cert, env, target)
    print(f"verify {args.certfile}: {'PASS' if ok else 'FAIL'}")
    if not ok:
        sys.exit(EXIT_VERIFY)


def _cmd_selftest(args) -> None:
    backend = parse_backend(args.backend)
    seed = args.seed
    env_seed = os.environ.get("FULLGROUP_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise MalformedInput(f"bad FULLGROUP_SEED {env_seed!r}") from exc
    config = RunConfig(backend=backend, seed=seed, max_depth=args.max_depth,
                       trial_count=args.trials, output_path=args.out)
    report = run_selftest(args.suite, config)
    summary = [f"selftest {args.suite} backend={backend.tag} seed={seed} "
               f"trials={args.trials}"]
    for prop in report["properties"]:
        status = "PASS" if prop["failures"] == 0 else "FAIL"
        summary.append(f"  {status}  {prop['name']}: "
                       f"{prop['passes']} passed, {prop['failures']} failed")
    _emit(report, summary, args.out)
    if not report["ok"]:
        sys.exit(EXIT_VERIFY)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fullgroup",
        description="Exact witness synthesis and certificate checking for "
                    "full groups of Cantor-space groupoids.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_backend(p):
        p.add_argument("--backend", default="odo2",
                       help="backend tag, e.g. odo2 or shift3 (default odo2)")

    def add_out(p):
        p.add_argument("--out", default=None, help="write the JSON artifact here")

    p = sub.add_parser("compare", help="emit a bisection witness for A -> B")
    p.add_argument("A")
    p.add_argument("B")
    add_backend(p)
    add_out(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("transfer", help="synthesize a full-group transfer element")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--commutator", action="store_true",
                   help="synthesize a derived-subgroup transfer instead")
    add_backend(p)
    add_out(p)
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("swap", help="exact swap involution between A and B")
    p.add_argument("A")
    p.add_argument("B")
    add_backend(p)
    add_out(p)
    p.set_defaults(func=_cmd_swap)

    p = sub.add_parser("gw", help="truncated anchored intertwining")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--rounds", type=int, required=True)
    add_backend(p)
    add_out(p)
    p.set_defaults(func=_cmd_gw)

    p = sub.add_parser("decompose", help="small-support decomposition of an element")
    p.add_argument("elem")
    p.add_argument("--eps", default=None, help="exact rational bound, e.g. 1/8")
    add_out(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("split", help="split an element into two proper-support factors")
    p.add_argument("elem")
    add_out(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("certify",
                       help="certificate putting [alpha, beta] in the normal closure of tau0")
    p.add_argument("--tau0", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    add_out(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("verify", help="verify a certificate file")
    p.add_argument("certfile")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("selftest", help="run a randomized property suite")
    p.add_argument("--suite", required=True,
                   help="one of: " + ", ".join(sorted(SUITES)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=4, dest="max_depth")
    add_backend(p)
    add_out(p)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except FullGroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
