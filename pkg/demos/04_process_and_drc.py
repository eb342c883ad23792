"""Dirty layout in, clean layout out: widening, bridges, rule check."""

from __future__ import annotations

from sqchip.layout import ChipLayout, DieBox
from sqchip.process import apply_rules, drc, get_process, insert_air_bridges
from sqchip.routing import RoutedPath


def report(tag: str, violations) -> None:
    print(f"{tag}: {len(violations)} violations")
    for v in violations:
        print(f"  [{v.rule}] {v.message}")


def main() -> None:
    rules = get_process("generic-10um")

    # two nets that cross, one of them drawn below the minimum width
    layout = ChipLayout("dirty", DieBox(0.0, 0.0, 900.0, 900.0))
    layout.paths.append(RoutedPath(
        "a", "control", 2, [(100.0, 400.0), (800.0, 400.0)], 4.0))
    layout.paths.append(RoutedPath(
        "b", "control", 2, [(450.0, 100.0), (450.0, 800.0)], 10.0))

    report("as drawn", drc(layout, rules))

    apply_rules(layout, rules)
    bridges = insert_air_bridges(layout, rules)
    print(f"\napplied {rules.name}: net a widened to "
          f"{layout.paths[0].width} um, {len(bridges)} air bridge(s)")

    report("\nafter process mapping", drc(layout, rules))


if __name__ == "__main__":
    main()
