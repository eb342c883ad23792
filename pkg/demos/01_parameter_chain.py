"""Forward parameter chain for one qubit, then a lattice from targets."""

from __future__ import annotations

from sqchip.circuit import inverse_solve, solve_qubit


def main() -> None:
    q = solve_qubit("q0", f_q=4.3e9, C_q=65e-15)
    print("single qubit seeded from C_q = 65 fF, f_q = 4.3 GHz")
    print(f"  E_C = {q.E_C / 1e6:8.2f} MHz")
    print(f"  E_J = {q.E_J / 1e9:8.3f} GHz   (E_J/E_C = {q.E_J / q.E_C:.0f})")
    print(f"  I_c = {q.I_c * 1e9:8.2f} nA")
    print(f"  R_n = {q.R_n / 1e3:8.1f} kOhm")
    print(f"  L_j = {q.L_j * 1e9:8.1f} nH")

    targets = {"q0": 4.3e9, "q1": 4.8e9, "q2": 4.3e9, "q3": 4.8e9}
    couplings = {("q0", "q1"): 5e6, ("q1", "q2"): 5e6, ("q2", "q3"): 5e6}
    qubits, edges = inverse_solve(targets, couplings, C_q=65e-15,
                                  require_distinct_neighbors=True)
    print("\nfour-qubit chain from frequency targets")
    for qid, rec in qubits.items():
        print(f"  {qid}: f_q = {rec.f_q / 1e9:.2f} GHz, "
              f"E_J = {rec.E_J / 1e9:.3f} GHz")
    for edge, cp in edges.items():
        print(f"  {edge[0]}-{edge[1]}: g = {cp.g_target / 1e6:.1f} MHz, "
              f"C_c = {cp.C_c * 1e15:.3f} fF")


if __name__ == "__main__":
    main()
