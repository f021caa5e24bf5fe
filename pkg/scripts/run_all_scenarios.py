#!/usr/bin/env python3
"""Run every built-in scenario into out/<name>/ and summarize the checks.

Usage: python scripts/run_all_scenarios.py [out_root]
"""

import sys
from pathlib import Path

from specpol.cli import main as cli_main
from specpol.scenarios import SCENARIO_NAMES


def main() -> int:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    failures = []
    for name in SCENARIO_NAMES:
        print(f"=== scenario {name}")
        code = cli_main(["scenario", name, "--out-dir", str(out_root / name)])
        if code != 0:
            failures.append((name, code))
    if failures:
        print("FAILED:", failures)
        return 1
    print(f"all {len(SCENARIO_NAMES)} scenarios passed; outputs in {out_root}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
