#!/usr/bin/env python3
"""Drive every staging sequence of the pizza form under both grammar styles.

Writes staging_report.json next to this script unless --out is given.

Usage: python scripts/staging_report.py [--permutations] [--out FILE]
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mixdialog.engine import load_bundle
from mixdialog.grammar import parse_grammar
from mixdialog.staging import drive_all_sequences

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--permutations", action="store_true")
    parser.add_argument("--out", default=str(Path(__file__).parent / "staging_report.json"))
    args = parser.parse_args()

    script, grammars = load_bundle(ROOT / "bundles" / "pizza.dlg")
    ordered = grammars["sizetoppingcrust.gram"]
    star = parse_grammar((ROOT / "bundles" / "alt" / "sizetoppingcrust.gram").read_text())

    combined = {}
    ok = True
    for label, grammar in [("explicit-orderings", ordered), ("word-star", star)]:
        outcome = drive_all_sequences(script, grammar, with_permutations=args.permutations)
        print(f"--- {label} ---")
        print(outcome.render_table())
        print()
        combined[label] = json.loads(outcome.to_json())
        ok = ok and outcome.all_passed()

    Path(args.out).write_text(json.dumps(combined, indent=2), encoding="utf-8")
    print(f"wrote {args.out}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
