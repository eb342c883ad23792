"""4x4 lattice from topology to mask files in one call."""

from __future__ import annotations

import time
from pathlib import Path

from sqchip.gdsio import export_svg
from sqchip.pipeline import run_pipeline


def main() -> None:
    t0 = time.perf_counter()
    result = run_pipeline(rows=4, cols=4)
    elapsed = time.perf_counter() - t0

    doc = result.document
    layout = doc.layout
    print(f"built {doc.name!r} in {elapsed:.2f} s")
    print(f"  qubits:     {len(doc.topology.qubits)}")
    print(f"  nets:       {len(result.routing.paths)} "
          f"({result.routing.total_corners} corners, "
          f"{result.routing.total_crossings} crossings)")
    print(f"  components: {len(layout.components)}")
    print(f"  DRC:        {len(result.drc_report)} violations")
    print(f"  die:        {layout.die.x1 - layout.die.x0:.0f} x "
          f"{layout.die.y1 - layout.die.y0:.0f} um")

    out = Path("demo_out")
    out.mkdir(exist_ok=True)
    (out / "chip4x4.gds").write_bytes(result.gds_bytes)
    export_svg(layout, out / "chip4x4.svg")
    print(f"wrote {out / 'chip4x4.gds'} ({len(result.gds_bytes)} bytes) "
          f"and {out / 'chip4x4.svg'}")

    for entry in doc.provenance_log:
        print(f"  {entry['operation']}")


if __name__ == "__main__":
    main()
