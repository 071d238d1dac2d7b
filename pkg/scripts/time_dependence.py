"""Residual time dependence of the O-beam state with and without the omega/2 flipper.

    python scripts/time_dependence.py --b0 2e-3 --tau 1e-3 --T 1e-4
"""

import argparse
import math

import numpy as np

from geophase.interferometry import RfFlipperConfig, resonance, time_dependence_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b0", type=float, default=2e-3, help="guide field of the omega flipper, T")
    ap.add_argument("--tau", type=float, default=1e-3, help="time in the rf field, s")
    ap.add_argument("--T", type=float, default=1e-4, help="flight time between flippers, s")
    args = ap.parse_args()

    res = resonance(RfFlipperConfig(args.b0, args.tau))
    omega = res.omega
    t = np.linspace(0.0, 4 * 2 * math.pi / omega, 200)
    print(f"omega/2pi = {omega / (2 * math.pi) / 1e3:.3f} kHz, b_rf = {res.b_rf:.3e} T, "
          f"Bloch-Siegert factor {res.bloch_siegert:.6f}")
    print(f"residual with omega/2 flipper:    {time_dependence_residual(t, omega, args.T):.2e}")
    print(f"residual without second flipper: "
          f"{time_dependence_residual(t, omega, args.T, second_flipper=False):.3f}")


if __name__ == "__main__":
    main()
