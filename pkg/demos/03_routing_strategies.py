"""Escape-route the same chip with both strategies and compare."""

from __future__ import annotations

import time

from sqchip.pipeline import run_pipeline


def main() -> None:
    rows = cols = 3
    print(f"{rows}x{cols} lattice, {rows * cols} qubits\n")
    print(f"{'strategy':<10} {'nets':>5} {'corners':>8} {'crossings':>10} "
          f"{'bridges':>8} {'time':>8}")
    for strategy in ("pattern", "maze"):
        t0 = time.perf_counter()
        result = run_pipeline(rows=rows, cols=cols, strategy=strategy)
        elapsed = time.perf_counter() - t0
        bridges = sum(1 for c in result.document.layout.components
                      if c.kind == "airbridge")
        r = result.routing
        print(f"{strategy:<10} {len(r.paths):>5} {r.total_corners:>8} "
              f"{r.total_crossings:>10} {bridges:>8} {elapsed:>7.2f}s")

    print("\nthe staircase patterns never cross by construction; the maze")
    print("router trades crossings (each one costs an air bridge) against")
    print("detours, so its totals depend on the penalty weights")


if __name__ == "__main__":
    main()
