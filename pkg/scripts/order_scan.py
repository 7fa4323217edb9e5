"""Print Hadamard truncation errors and fitted orders for the harmonic and quartic models."""
import argparse

from heisenlab.convergence import default_dt_grid, run_operator_order_scan
from heisenlab.models import ModelSpec, build_fock_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--lam", type=float, default=0.1)
    args = ap.parse_args()
    dts = default_dt_grid()
    for name, lam in (("harmonic", 0.0), ("quartic", args.lam)):
        rep = run_operator_order_scan(build_fock_model(ModelSpec(dim=args.dim, lam=lam)), (0, 1, 2, 3), dts)
        print(f"# {name} N={args.dim}")
        print("dt," + ",".join(rep.errors))
        for i, dt in enumerate(dts):
            print(f"{dt:.6g}," + ",".join(f"{v[i]:.3e}" for v in rep.errors.values()))
        for key, fit in rep.fits.items():
            print(f"{key}: slope {fit.slope} R2 {fit.r_squared} ({fit.status})")


if __name__ == "__main__":
    main()
