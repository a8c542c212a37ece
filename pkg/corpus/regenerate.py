"""Rewrite corpus/expected/*.json from the current CLI.

    python corpus/regenerate.py

Only run this after checking that a report change is intended; the test suite
compares the CLI output against these files byte for byte.
"""

import json
import sys
from pathlib import Path

from intdeform.cli import _dump, run

HERE = Path(__file__).resolve().parent


def main() -> int:
    entries = json.loads((HERE / "manifest.json").read_text())
    bad = 0
    for e in entries:
        code, report, _ = run([e["command"], "--input", str(HERE / "inputs" / e["input"])])
        (HERE / "expected" / f"{e['name']}.json").write_text(_dump(report), encoding="utf-8")
        flag = "" if code == e["exit"] else f"  (expected exit {e['exit']})"
        bad += bool(flag)
        print(f"{e['name']:32s} exit {code}{flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
