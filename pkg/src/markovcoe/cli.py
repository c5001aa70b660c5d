"""Command-line front end.

Exit codes: 0 success, 1 an expectation failed, 2 invalid input,
3 contradictory evidence.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import fullgroup as fg
from .equiv import (
    RELATIONS,
    Bounds,
    ContradictoryEvidence,
    classify,
    report_to_json,
    report_to_text,
    scoe_check,
    verify_eventual_conjugacy,
    verify_ucoe,
)
from .fullgroup import TableauError, parse_tableau
from .invariants import invariant_report
from .sft import MatrixError, TransitionMatrix, format_function, parse_matrix
from .transducer import (
    HomeoCertificate,
    TransducerError,
    check_coe_data,
    extract_coe_data,
    load_transducer,
    verify_homeomorphism,
)

EXIT_OK, EXIT_EXPECTATION, EXIT_INVALID, EXIT_CONTRADICTION = 0, 1, 2, 3


class InvalidInput(Exception):
    pass


def data_dir() -> Path:
    return Path(str(resources.files("markovcoe") / "data"))


def load_matrix(path: Path) -> TransitionMatrix:
    try:
        return parse_matrix(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"{path}: {exc.strerror}") from None
    except MatrixError as exc:
        raise InvalidInput(f"{path}: {type(exc).__name__}: {exc}") from None


def load_certificate(fwd: Path, bwd: Path) -> HomeoCertificate:
    try:
        return HomeoCertificate(load_transducer(fwd), load_transducer(bwd), Path(fwd).stem)
    except OSError as exc:
        raise InvalidInput(f"{exc.filename}: {exc.strerror}") from None
    except (TransducerError, MatrixError, ValueError) as exc:
        raise InvalidInput(f"certificate {fwd}: {exc}") from None


def _emit(fmt: str, payload: dict, text: str) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n" if fmt == "json" else text)


# -- subcommands ---------------------------------------------------------------------


def cmd_invariants(args) -> int:
    reports = {}
    for path in args.matrices:
        reports[str(path)] = invariant_report(load_matrix(path))
    text = "".join(
        f"matrix {name}\n" + "".join(f"{k} = {v}\n" for k, v in rep.items()) for name, rep in reports.items()
    )
    _emit(args.format, reports, text)
    return EXIT_OK


def cmd_classify(args) -> int:
    A, B = load_matrix(args.a), load_matrix(args.b)
    certs = [load_certificate(f, b) for f, b in args.cert or []]
    report = classify(A, B, certs, _bounds(args), (Path(args.a).stem, Path(args.b).stem))
    sys.stdout.write(report_to_json(report) + "\n" if args.format == "json" else report_to_text(report))
    return EXIT_OK


def cmd_fullgroup(args) -> int:
    A = load_matrix(args.matrix)
    need = 2 if args.op == "compose" else 1
    if len(args.tableaux) != need:
        raise InvalidInput(f"{args.op} takes {need} tableau file(s)")
    try:
        taus = [parse_tableau(A, Path(p).read_text()) for p in args.tableaux]
    except OSError as exc:
        raise InvalidInput(f"{exc.filename}: {exc.strerror}") from None
    except TableauError as exc:
        raise InvalidInput(f"{type(exc).__name__}: {exc}") from None
    if args.op == "is-af":
        K = fg.is_af(taus[0])
        _emit(args.format, {"af": K is not None, "K": K}, "No\n" if K is None else f"Yes K={K}\n")
    elif args.op == "cocycle":
        f = fg.cocycle(taus[0])
        _emit(args.format, {"depth": f.depth, "table": {_w(w): v for w, v in f.table.items()}}, format_function(f))
    else:
        tau = fg.compose(*taus) if args.op == "compose" else fg.invert(taus[0])
        tau = fg.canonical(tau)
        _emit(args.format, {"pairs": [[_w(s), _w(t)] for s, t in tau.pairs]}, fg.format_tableau(tau))
    return EXIT_OK


def _w(word) -> str:
    return "".join(map(str, word)) or "-"


def cmd_verify_cert(args) -> int:
    c = load_certificate(args.forward, args.backward)
    b = _bounds(args)
    out: dict[str, object] = {"certificate": c.name}
    check = verify_homeomorphism(c)
    out["homeomorphism"] = "verified" if check else f"failed on X_{check.space}: {check.reason} at {check.witness}"
    if check:
        data = extract_coe_data(c, b.search_bound, b.max_depth)
        if data is not None and check_coe_data(c, data):
            out["c1"] = repr(data.c1)
            out["c2"] = repr(data.c2)
            sc = scoe_check(c, data, b.coboundary_depth)
            out["cocycles_trivial"] = sc.status
        else:
            out["coe_data"] = f"inconclusive within search bound {b.search_bound}, depth {b.max_depth}"
        ev = verify_eventual_conjugacy(c, b.k_bound)
        out["eventual_conjugacy"] = f"K1={ev.k1} K2={ev.k2}" if ev else ev.reason
        if data is not None:
            uc = verify_ucoe(c, b.ucoe_depth, b.k_bound)
            out["ucoe_generators"] = "verified" if uc else f"failed at {uc.witness!r} on X_{uc.side}"
    _emit(args.format, out, "".join(f"{k}: {v}\n" for k, v in out.items()))
    return EXIT_OK if check else EXIT_EXPECTATION


def read_golden(path: Path) -> list[tuple[list[str], dict[str, str]]]:
    """Golden lines are ``A B status...`` or ``cert FWD BWD A B status...``."""
    rows = []
    for line in path.read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        head = parts[: len(parts) - len(RELATIONS)]
        rows.append((head, dict(zip(RELATIONS, parts[len(head) :]))))
    return rows


def run_examples(directory: Path, bounds: Bounds) -> list[dict]:
    """Classify every golden row and compare; one result per row, in file order."""
    results = []
    for head, expected in read_golden(directory / "relations.golden"):
        certs = []
        if head[0] == "cert":
            certs = [load_certificate(directory / head[1], directory / head[2])]
            head = head[3:]
        a, b = head
        report = classify(load_matrix(directory / f"{a}.mat"), load_matrix(directory / f"{b}.mat"), certs, bounds, (a, b))
        got = {r: report.state(r) for r in RELATIONS}
        mismatches = [f"{r} expected {expected[r]} got {got[r]}" for r in RELATIONS if got[r] != expected[r]]
        results.append({"pair": [a, b], "certificates": [c.name for c in certs], "statuses": got, "mismatches": mismatches})
    return results


def cmd_examples(args) -> int:
    directory = Path(args.data_dir) if args.data_dir else data_dir()
    results = run_examples(directory, _bounds(args))
    failed = [r for r in results if r["mismatches"]]
    lines = []
    for r in results:
        tag = "FAIL" if r["mismatches"] else "ok"
        extra = f" with {','.join(r['certificates'])}" if r["certificates"] else ""
        statuses = " ".join(f"{k}={v}" for k, v in r["statuses"].items())
        lines.append(f"{tag} {r['pair'][0]} {r['pair'][1]}{extra}: {statuses}")
        lines += [f"  {m}" for m in r["mismatches"]]
    if failed:
        first = failed[0]
        lines.append(f"first failure: {first['pair'][0]} {first['pair'][1]}: {first['mismatches'][0]}")
    lines.append(f"{len(results) - len(failed)}/{len(results)} rows match")
    _emit(args.format, {"results": results, "passed": not failed}, "\n".join(lines) + "\n")
    return EXIT_EXPECTATION if failed else EXIT_OK


# -- argument parsing -----------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _bounds(args) -> Bounds:
    return Bounds(
        search_bound=args.search_bound, max_depth=args.max_depth, k_bound=args.k_bound, inner_dim=args.inner_dim
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--search-bound", type=_positive, default=Bounds.search_bound)
    common.add_argument("--max-depth", type=_positive, default=Bounds.max_depth)
    common.add_argument("--k-bound", type=_positive, default=Bounds.k_bound)
    common.add_argument("--inner-dim", type=_positive, default=Bounds.inner_dim, help="SSE inner dimension cap")

    parser = argparse.ArgumentParser(prog="markovcoe", description="Orbit equivalence toolkit for Markov shifts.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("invariants", parents=[common], help="det(I-A), K-groups, dimension group, charpoly")
    p.add_argument("matrices", nargs="+", type=Path)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("classify", parents=[common], help="relation report for a pair of matrices")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--cert", nargs=2, action="append", type=Path, metavar=("FORWARD", "BACKWARD"))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fullgroup", parents=[common], help="operations on tableaux")
    p.add_argument("op", choices=("compose", "invert", "cocycle", "is-af"))
    p.add_argument("matrix", type=Path)
    p.add_argument("tableaux", nargs="+", type=Path)
    p.set_defaults(func=cmd_fullgroup)

    p = sub.add_parser("verify-cert", parents=[common], help="check a pair of transducers")
    p.add_argument("forward", type=Path)
    p.add_argument("backward", type=Path)
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("examples", parents=[common], help="classify the named matrices against the golden table")
    p.add_argument("--data-dir", type=Path, default=None)
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ContradictoryEvidence as exc:
        print(f"contradictory evidence: {exc}", file=sys.stderr)
        return EXIT_CONTRADICTION


if __name__ == "__main__":
    sys.exit(main())
