#!/usr/bin/env python3
"""Run every acceptance criterion and print one pass/fail line each."""

import sys
import time

from fracdamp.acceptance import run_all


def main() -> int:
    t0 = time.perf_counter()
    results = run_all()
    for res in results:
        print(res.line())
    total = time.perf_counter() - t0
    failed = [r.name for r in results if not r.passed]
    print(f"total: {total:.1f}s, {len(results) - len(failed)}/{len(results)} passed")
    if failed:
        print("failed:", ", ".join(failed))
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
