"""Router scaling benchmark: wall time vs qubit count for both strategies.

Each cell prepares a placed-and-dressed layout once, then times only the
escape-routing realization (pin allocation through path emission) on fresh
copies. Medians over repetitions feed a log-log least-squares fit.
"""

from __future__ import annotations

import copy
import csv
import math
import statistics
import time
from dataclasses import dataclass, field

from .errors import SqchipError
from .layout import generate_readout_bus, place_qubits
from .maze import build_grid, resolve_target, route_all
from .pattern import allocate_pins, map_pins, route_pattern
from .topology import generate_grid, rows_bottom_up


@dataclass(frozen=True)
class BenchRecord:
    strategy: str
    m: int
    n: int
    qubits: int
    median_s: float
    min_s: float
    max_s: float
    nets: int
    crossings: int


@dataclass
class BenchResult:
    records: list[BenchRecord] = field(default_factory=list)
    exponents: dict = field(default_factory=dict)   # strategy -> (slope, r2)
    failures: list[tuple[str, int, int, str]] = field(default_factory=list)


def _prepare(m: int, n: int, pitch: float = 2000.0):
    topo = generate_grid(m, n)
    layout = place_qubits(topo, "xmon", pitch)
    for row in rows_bottom_up(topo):
        generate_readout_bus(layout, row, 6.535e9, 7.246e9)
    return topo, layout


def _run_pattern(topo, layout) -> tuple[int, int]:
    allocate_pins(layout, topo)
    result = route_pattern(layout, topo)
    return len(result.paths), result.total_crossings


def _run_maze(topo, layout, cell: float, clearance: float) -> tuple[int, int]:
    allocate_pins(layout, topo)
    targets = map_pins(layout.pins, topo)
    grid = build_grid(layout, cell=cell, clearance=clearance)
    standoff = clearance + 2.0 * cell
    nets = []
    for pin in sorted(layout.pins, key=lambda p: p.pin_id):
        _, off = resolve_target(layout, targets[pin.pin_id], standoff)
        nets.append((pin.pin_id, grid.cell_at(*pin.position),
                     grid.cell_at(*off)))
    result = route_all(grid, nets)
    if result.failures:
        raise SqchipError(f"{len(result.failures)} nets unroutable")
    return len(result.paths), result.total_crossings


def bench_cell(strategy: str, m: int, n: int, repetitions: int = 3,
               maze_cell: float = 100.0, maze_clearance: float = 20.0,
               ) -> BenchRecord:
    """Median routing time for one (strategy, size) cell."""
    topo, prepared = _prepare(m, n)
    times = []
    nets = crossings = 0
    for _ in range(repetitions):
        work = copy.deepcopy(prepared)
        t0 = time.perf_counter()
        if strategy == "pattern":
            nets, crossings = _run_pattern(topo, work)
        else:
            nets, crossings = _run_maze(topo, work, maze_cell, maze_clearance)
        times.append(time.perf_counter() - t0)
    return BenchRecord(strategy, m, n, m * n, statistics.median(times),
                       min(times), max(times), nets, crossings)


def fit_exponent(records: list[BenchRecord]) -> tuple[float, float] | None:
    """Least-squares slope of log(median) vs log(qubits), with R^2.

    Needs at least three distinct sizes; returns None below that.
    """
    pts = sorted({(r.qubits, r.median_s) for r in records})
    if len(pts) < 3:
        return None
    xs = [math.log(q) for q, _ in pts]
    ys = [math.log(max(t, 1e-9)) for _, t in pts]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    b = my - slope * mx
    ss_res = sum((y - (slope * x + b)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, r2


def bench_scaling(sizes: list[tuple[int, int]],
                  strategies: tuple[str, ...] = ("pattern", "maze"),
                  repetitions: int = 3, parallel: bool = False,
                  maze_cell: float = 100.0) -> BenchResult:
    """Run the full grid of cells; per-cell failures are recorded, not
    raised."""
    if not sizes:
        raise SqchipError("no sizes to benchmark")
    if repetitions < 3:
        raise SqchipError("need at least 3 repetitions for a stable median")
    out = BenchResult()
    cells = [(s, m, n) for s in strategies for m, n in sizes]
    if parallel:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor() as pool:
            futures = {pool.submit(bench_cell, s, m, n, repetitions,
                                   maze_cell): (s, m, n)
                       for s, m, n in cells}
            for fut, (s, m, n) in futures.items():
                try:
                    out.records.append(fut.result())
                except Exception as exc:
                    out.failures.append((s, m, n, str(exc)))
    else:
        for s, m, n in cells:
            try:
                out.records.append(bench_cell(s, m, n, repetitions,
                                              maze_cell))
            except Exception as exc:
                out.failures.append((s, m, n, str(exc)))
    for s in strategies:
        fit = fit_exponent([r for r in out.records if r.strategy == s])
        if fit is not None:
            out.exponents[s] = fit
    return out


CSV_COLUMNS = ("strategy", "m", "n", "qubits", "median_s", "min_s", "max_s",
               "nets", "crossings")


def write_csv(records: list[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([getattr(r, c) for c in CSV_COLUMNS])
