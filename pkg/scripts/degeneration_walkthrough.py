"""Show the eps-expansion of a transformed vector field at one random target point."""

import argparse
import random

from coupled_painleve.systems import build_system
from coupled_painleve.verify import SCHEME_NAMES, degeneration_scheme, transformed_field


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scheme", choices=SCHEME_NAMES)
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    scheme = degeneration_scheme(args.scheme)
    target = build_system(scheme.target)
    point = target.sample_point(random.Random(args.seed))
    print("point:", {k: str(v) for k, v in point.items()})
    for v, s in zip(target.phase, transformed_field(scheme, point, args.order + 8)):
        print(f"d{v}/d{target.time} =", s.truncate(args.order))


if __name__ == "__main__":
    main()
