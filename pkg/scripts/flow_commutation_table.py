"""Tabulate numeric flow-commutation errors for every generator across a range of tolerances."""

import argparse

from coupled_painleve.numeric import flow_commutation_cases
from coupled_painleve.sampling import check_rng
from coupled_painleve.systems import SYSTEM_NAMES
from coupled_painleve.weyl import generators


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--starts", type=int, default=3)
    ap.add_argument("--tols", type=float, nargs="+", default=[1e-6, 1e-8, 1e-10])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    header = ["system", "map", "time"] + [f"rtol={t:.0e}" for t in args.tols]
    print(" | ".join(header))
    print(" | ".join("---" for _ in header))
    for system in SYSTEM_NAMES:
        for name, m in generators(system).items():
            row = [system, name, m.time_action]
            for tol in args.tols:
                errs = flow_commutation_cases(m, args.starts, check_rng(args.seed, f"{system}/{name}"), tol)
                row.append(f"{max(errs):.2e}")
            print(" | ".join(row))


if __name__ == "__main__":
    main()
