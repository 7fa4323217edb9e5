"""One-step quantum-classical gaps for a coherent state; quartic slopes and P prefactor."""
import argparse

from heisenlab.convergence import default_dt_grid, run_quantum_classical_gap
from heisenlab.models import ModelSpec, build_fock_model, coherent_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--dim", type=int, default=96)
    args = ap.parse_args()
    model = build_fock_model(ModelSpec(dim=args.dim, lam=args.lam))
    rep = run_quantum_classical_gap(model, coherent_state(model.spec, args.alpha), default_dt_grid())
    print("dt,errQ,errP")
    for dt, eq, ep in zip(rep.dt_grid, rep.errors["Q"], rep.errors["P"]):
        print(f"{dt:.6g},{eq:.6e},{ep:.6e}")
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value} ({c.criterion})")
    if "prefactor_P" in rep.details:
        print(f"prefactor measured {rep.details['prefactor_P']:.8f} expected {rep.details['prefactor_P_expected']:.8f}")


if __name__ == "__main__":
    main()
