"""Measure how routing time grows with qubit count, per strategy."""

from __future__ import annotations

from sqchip.bench import bench_scaling


def main() -> None:
    sizes = [(2, 2), (3, 3), (4, 4), (6, 6)]
    print("timing both strategies over", ", ".join(f"{m}x{n}"
                                                   for m, n in sizes))
    result = bench_scaling(sizes, repetitions=3)

    print(f"\n{'strategy':<10} {'size':>6} {'qubits':>7} {'median':>10} "
          f"{'nets':>6} {'crossings':>10}")
    for r in result.records:
        print(f"{r.strategy:<10} {r.m:>3}x{r.n:<2} {r.qubits:>7} "
              f"{r.median_s * 1e3:>8.1f}ms {r.nets:>6} {r.crossings:>10}")

    print()
    for strategy, (slope, r2) in sorted(result.exponents.items()):
        print(f"{strategy}: time ~ qubits^{slope:.2f}  (R^2 = {r2:.3f})")
    if result.failures:
        print("failures:", result.failures)


if __name__ == "__main__":
    main()
