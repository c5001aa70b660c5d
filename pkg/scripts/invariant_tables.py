"""Print the invariant table and the relation matrix for the named matrices.

    python3 scripts/invariant_tables.py
    python3 scripts/invariant_tables.py --names A2 B2 A4 --json out.json
"""

from __future__ import annotations

import argparse
import itertools
import json
from dataclasses import dataclass, field

from markovcoe.equiv import RELATIONS, Bounds, classify
from markovcoe.generators import NAMED_MATRICES, b2_to_a2, named
from markovcoe.invariants import REPORT_KEYS, invariant_report

SHORT = {"established": "yes", "refuted": "no", "unknown": "?"}


@dataclass
class TableConfig:
    names: list[str] = field(default_factory=lambda: list(NAMED_MATRICES))
    with_certificate: bool = False
    json_path: str | None = None
    bounds: Bounds = field(default_factory=Bounds)


def invariant_rows(cfg: TableConfig) -> dict[str, dict[str, str]]:
    return {name: invariant_report(named(name)) for name in cfg.names}


def relation_rows(cfg: TableConfig) -> list[dict]:
    rows = []
    for a, b in itertools.combinations(cfg.names, 2):
        certs = [b2_to_a2()] if cfg.with_certificate and {a, b} == {"A2", "B2"} else []
        if certs and (a, b) == ("A2", "B2"):
            a, b = b, a  # the shipped certificate runs from B2 to A2
        report = classify(named(a), named(b), certs, cfg.bounds, (a, b))
        rows.append({"pair": [a, b], **{r: report.state(r) for r in RELATIONS}})
    return rows


def print_tables(invariants: dict[str, dict[str, str]], relations: list[dict]) -> None:
    width = max(len(k) for k in REPORT_KEYS)
    print(" " * width + "".join(f"{n:>16}" for n in invariants))
    for key in REPORT_KEYS:
        print(f"{key:<{width}}" + "".join(f"{rep[key]:>16}" for rep in invariants.values()))
    print()
    print(f"{'pair':<8}" + "".join(f"{r:>6}" for r in RELATIONS))
    for row in relations:
        pair = "/".join(row["pair"])
        print(f"{pair:<8}" + "".join(f"{SHORT[row[r]]:>6}" for r in RELATIONS))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--names", nargs="+", choices=list(NAMED_MATRICES), default=list(NAMED_MATRICES))
    p.add_argument("--with-certificate", action="store_true", help="supply the B2 -> A2 certificate")
    p.add_argument("--json", dest="json_path")
    args = p.parse_args()
    cfg = TableConfig(args.names, args.with_certificate, args.json_path)

    invariants, relations = invariant_rows(cfg), relation_rows(cfg)
    print_tables(invariants, relations)
    if cfg.json_path:
        with open(cfg.json_path, "w") as fh:
            json.dump({"invariants": invariants, "relations": relations}, fh, indent=2)


if __name__ == "__main__":
    main()
