"""Averaged linking number and l_1 length of a disc twist as its amplitude varies.

Writes a small CSV that shows Phi / l_1 staying put while both scale.

    python scripts/scan_twist_amplitude.py --samples 4000 > twist_scan.csv
"""
import argparse
import csv
import math
import sys

from confbraid.flow import Isotopy, lp_length
from confbraid.geometry import RadialBump, UnitDisc
from confbraid.gg import ShortPathSystem, base_configuration, gg_average
from confbraid.quasimorphism import lk_quasimorphism


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    disc = UnitDisc()
    system = ShortPathSystem(disc, base_configuration(disc, (0.0, 0.0), 0.4, 2))
    qm = lk_quasimorphism(2, 0, 1)
    out = csv.writer(sys.stdout)
    out.writerow(["turns", "Phi", "Phi_se", "l1", "Phi_over_l1"])
    for i, turns in enumerate((0.5, 1.0, 2.0, 3.0)):
        iso = Isotopy(disc, RadialBump((0.0, 0.0), 0.5, 0.8, 2 * math.pi * turns), 0.0, 1.0, int(60 * turns) + 20)
        phi = gg_average(system, iso, qm, args.samples, [args.seed, i, 0])
        l1 = lp_length(iso, 1, 20000, [args.seed, i, 1])
        out.writerow([turns, f"{phi.estimate:.6g}", f"{phi.standard_error:.3g}", f"{l1.value:.6g}",
                      f"{phi.estimate / l1.value:.6g}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
