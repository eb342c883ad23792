"""Save a design, reload it, and swap parameters through bundles."""

from __future__ import annotations

from pathlib import Path

from sqchip.document import extract, inject, load_document, save_document
from sqchip.pipeline import run_pipeline


def main() -> None:
    result = run_pipeline(rows=2, cols=2, name="doc-demo")
    doc = result.document

    out = Path("demo_out")
    out.mkdir(exist_ok=True)
    path = save_document(doc, out / "doc-demo.json")
    sidecar = path.with_suffix(".gds")
    print(f"saved {path} ({path.stat().st_size} bytes) "
          f"+ {sidecar.name} ({sidecar.stat().st_size} bytes)")

    back = load_document(path)
    print(f"reloaded {back.name!r}: {len(back.topology.qubits)} qubits, "
          f"{len(back.layout.paths)} paths")

    # pull the electrical section, retarget one qubit, push it back
    bundle = extract(back, "circuit")
    bundle.sections["circuit"].qubits["q0"].f_q = 4.55e9
    updated = inject(back, bundle, operation="retarget-q0")
    print(f"q0 retargeted: {back.circuit.qubits['q0'].f_q / 1e9:.2f} GHz "
          f"in the old document, "
          f"{updated.circuit.qubits['q0'].f_q / 1e9:.2f} GHz in the new")

    print("\nprovenance trail:")
    for entry in updated.provenance_log:
        print(f"  {entry['operation']}  {entry['digest']}")


if __name__ == "__main__":
    main()
