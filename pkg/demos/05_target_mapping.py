"""Hit a capacitance target by bisecting a tunable dimension."""

from __future__ import annotations

from sqchip.devmap import (
    MappingProblem,
    make_evaluator,
    map_qubit_capacitance,
    solve,
)
from sqchip.layout import place_qubits
from sqchip.topology import generate_grid


def main() -> None:
    # standalone loop against the shipped analytic stub
    target = 1.0e-15
    problem = MappingProblem("pad_area", 50.0, 1250.0, target)
    evaluator = make_evaluator("stub:pad-capacitance")
    result = solve(problem, evaluator)
    print(f"pad-capacitance stub, target {target * 1e15:.2f} fF")
    print(f"  mapped value : {result.value:.3f} um^2")
    print(f"  metric       : {result.metric * 1e15:.5f} fF")
    print(f"  iterations   : {result.iterations} "
          f"({evaluator.calls} evaluator calls)")

    # same loop retuning a placed qubit's record
    layout = place_qubits(generate_grid(2, 2), "xmon", 2000.0)
    mapped = map_qubit_capacitance(layout, "q0", 65e-15)
    comp = layout.component_by_id("q0")
    print("\nretuned q0 on a placed 2x2 lattice")
    print(f"  arm length  : {mapped.value:.2f} um")
    print(f"  capacitance : {mapped.metric * 1e15:.3f} fF "
          f"(target {comp.params['mapping_target'] * 1e15:.1f} fF)")


if __name__ == "__main__":
    main()
