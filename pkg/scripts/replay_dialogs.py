#!/usr/bin/env python3
"""Replay the three reference pizza dialogs and print transcripts + traces.

Usage: python scripts/replay_dialogs.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mixdialog.engine import load_bundle, new_session, render_transcript, run_batch
from mixdialog.trace import build_trace, render_notation_with_indices

ROOT = Path(__file__).resolve().parents[1]

DIALOGS = {
    "system-directed": [
        "I'd like a medium, please.",
        "Pepperoni.",
        "Uh, deep-dish.",
        "Yes.",
    ],
    "out-of-turn topping": [
        "I'd like a sausage pizza, please.",
        "Medium.",
        "Deep-dish.",
        "Yes.",
    ],
    "everything at once": [
        "I'd like a sausage pizza, medium, and deep-dish.",
        "Yes.",
    ],
}


def main() -> None:
    script, grammars = load_bundle(ROOT / "bundles" / "pizza.dlg")
    for title, lines in DIALOGS.items():
        session = new_session(script, grammars)
        turns = run_batch(session, lines)
        print(f"=== {title} ===")
        print(render_transcript(turns), end="")
        trace = build_trace(turns, greeting_as_response=True)
        print(render_notation_with_indices(trace))
        print()


if __name__ == "__main__":
    main()
