"""Command-line front end.  Reports are ``key: value`` lines; exit status is
0 on success, 1 on a logical failure and 2 on usage or input errors."""

from __future__ import annotations

import argparse
import sys

from .instance import TABLES, InstanceFileError, UnknownSignature
from .native import (
    NativeError,
    check_native,
    decode_native,
    encode_native,
    native_rule_reader,
    native_system,
)
from .presets import PresetError, load_instance
from .proof import (
    Proof,
    ProofSyntaxError,
    RuleError,
    check_proof,
    proof_size,
    read_proof,
    to_latex,
    write_proof,
)
from .search import SearchBudget, search_cutfree
from .syntax import ParseError, parse_sequent, show_sequent
from .transform import (
    TransformError,
    TransformReport,
    eliminate_cut,
    eliminate_subsumption,
    expand_axioms,
    forget_to_ll,
    girardize,
)


class UsageError(Exception):
    pass


class LogicalFailure(Exception):
    pass


def _bounds(text: str) -> tuple[int, int]:
    try:
        k, n = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected K,N such as 6,6") from None
    if k < 0 or n < 0:
        raise argparse.ArgumentTypeError("bounds must be non-negative")
    return k, n


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance file or preset:NAME")
    common.add_argument("--bounds", type=_bounds, default=(6, 6), help="K,N for bounded axiom checks")
    common.add_argument("-o", "--output", help="write the resulting proof or report here")
    common.add_argument("--strict", action="store_true", help="stored conclusions must match exactly")
    common.add_argument("--measure", choices=("raw", "exchange-free"), default="exchange-free")

    ap = argparse.ArgumentParser(prog="superll", description="Proof kernel for superLL, linear logic with parameterized exponentials.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="validate a proof")
    c.add_argument("proof")
    for name, text in (
        ("cut-elim", "eliminate every cut"),
        ("girardize", "replace functorial promotion and digging by Girard's promotion"),
        ("desubsume", "replace unary contraction by ordered promotion"),
        ("expand", "expand axioms to atomic ones"),
        ("forget", "collapse every signature to the single LL exponential"),
        ("export-latex", "print a bussproofs rendering"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("proof")
        if name == "cut-elim":
            s.add_argument("--debug", action="store_true", help="re-validate after every substitution step")

    v = sub.add_parser("verify-axioms", parents=[common], help="check an axiom table")
    v.add_argument("--table", choices=tuple(TABLES) + ("all",), default="all")

    s = sub.add_parser("search", parents=[common], help="bounded cut-free proof search")
    s.add_argument("--goal", required=True)
    s.add_argument("--depth", type=int, default=12)
    s.add_argument("--nodes", type=int, default=100_000)
    s.add_argument("--arity", type=int, default=3, help="largest contraction arity tried")

    t = sub.add_parser("translate", parents=[common], help="native proofs to and from superLL")
    t.add_argument("direction", choices=("encode", "decode"))
    t.add_argument("preset", help="system name, e.g. sll or sell:a<b;W=b;C=a,b")
    t.add_argument("proof")
    return ap


def _read(path: str, reader=None) -> tuple[str, Proof]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return text, (read_proof(text, reader) if reader else read_proof(text))
    except (ProofSyntaxError, RuleError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _instance(args):
    if not args.instance:
        raise UsageError("--instance is required")
    try:
        return load_instance(args.instance)
    except (InstanceFileError, PresetError) as exc:
        raise UsageError(str(exc)) from None
    except OSError as exc:
        raise UsageError(f"{args.instance}: {exc.strerror}") from None


def _validate(inst, p: Proof, path: str, strict: bool) -> None:
    rep = check_proof(inst, p, strict=strict)
    if not rep.ok:
        f = rep.first
        raise LogicalFailure(f"{path}:{f.where()}: ({f.rule}) {f.message}")


def _emit(args, lines: list[str], proof_text: str | None) -> None:
    """Proofs go to ``-o`` when given, else to stdout with the report moved to stderr."""
    out = sys.stderr if proof_text is not None and not args.output else sys.stdout
    for line in lines:
        print(line, file=out)
    if proof_text is None:
        return
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(proof_text + "\n")
        print(f"output: {args.output}", file=out)
    else:
        print(proof_text)


def _size_lines(args, before: Proof | None, after: Proof) -> list[str]:
    mode = args.measure
    out = []
    if before is not None:
        out.append(f"input-size: {proof_size(before, mode)}")
    out += [f"output-size: {proof_size(after, mode)}", f"cut-free: {'yes' if after.cut_free else 'no'}"]
    return out


def run(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LogicalFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "translate":
        return _translate(args)
    inst = _instance(args)
    if cmd == "verify-axioms":
        tables = list(TABLES) if args.table == "all" else [args.table]
        ok = True
        lines = [f"instance: {inst.name}"]
        for t in tables:
            rep = TABLES[t](inst, args.bounds)
            ok &= rep.ok
            lines += rep.lines()
        if args.output:
            with open(args.output, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        print("\n".join(lines))
        return 0 if ok else 1
    if cmd == "search":
        try:
            goal = parse_sequent(args.goal)
        except ParseError as exc:
            raise UsageError(f"--goal: {exc}") from None
        try:
            budget = SearchBudget(args.depth, args.nodes, args.arity)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            res = search_cutfree(inst, goal, budget)
        except UnknownSignature as exc:
            raise UsageError(str(exc)) from None
        _emit(args, res.lines(), write_proof(res.proof) if res.found else None)
        return 0 if res.found else 1

    path = args.proof
    _, p = _read(path)
    _validate(inst, p, path, args.strict)
    if cmd == "check":
        lines = ["result: valid", f"conclusion: {show_sequent(p.conclusion)}", f"nodes: {sum(1 for _ in p.nodes())}"]
        lines += [f"size: {proof_size(p, args.measure)}", f"cut-free: {'yes' if p.cut_free else 'no'}"]
        _emit(args, lines, None)
        return 0
    if cmd == "export-latex":
        _emit(args, [], to_latex(p))
        return 0
    report = TransformReport(cmd)
    try:
        match cmd:
            case "cut-elim":
                out = eliminate_cut(inst, p, args.bounds, debug=args.debug, report=report)
            case "girardize":
                out = girardize(inst, p, args.bounds, report=report)
            case "desubsume":
                out = eliminate_subsumption(inst, p, args.bounds, report=report)
            case "expand":
                out = expand_axioms(inst, p)
            case "forget":
                out = forget_to_ll(p)
    except TransformError as exc:
        raise LogicalFailure(f"{path}: {exc}") from None
    lines = [f"transform: {cmd}", f"conclusion: {show_sequent(out.conclusion)}"]
    lines += _size_lines(args, p, out)
    lines += [f"step {k}: {v}" for k, v in sorted(report.steps.items())]
    if report.witness_queries:
        lines.append(f"witness-queries: {len(report.witness_queries)}")
    _emit(args, lines, write_proof(out))
    return 0


def _translate(args) -> int:
    try:
        system = native_system(args.preset)
    except (NativeError, PresetError) as exc:
        raise UsageError(str(exc)) from None
    path = args.proof
    _, p = _read(path, native_rule_reader)
    try:
        if args.direction == "encode":
            rep = check_native(system, p, strict=args.strict)
            if not rep.ok:
                f = rep.first
                raise LogicalFailure(f"{path}:{f.where()}: ({f.rule}) {f.message}")
            out = encode_native(system, p, check=False)
        else:
            inst = system.instance()
            _validate(inst, p, path, args.strict)
            out = decode_native(system, p, inst)
    except (NativeError, TransformError) as exc:
        raise LogicalFailure(f"{path}: {exc}") from None
    lines = [f"translate: {args.direction}", f"system: {system.name}", f"conclusion: {show_sequent(out.conclusion)}"]
    lines += _size_lines(args, p, out)
    _emit(args, lines, write_proof(out))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
