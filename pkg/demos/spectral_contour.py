"""Sweep the Evans function around the right half-plane contour.

Builds the weighted-space setup for the marginal wave, shows the limiting
exponential rates that the connection-mismatch determinant interpolates
between, then winds a moderate contour and counts zeros.  Zero winding on the
full contour (the CLI default, radii 1e-3 to 1e3) is the spectral-stability
verdict; this demo uses a reduced contour to stay quick.  Run with
`python3 demos/spectral_contour.py` (takes ~10 s).
"""

import numpy as np

from branchwaves import (
    contour_of_S,
    evans,
    limit_splitting,
    make_setup,
    winding_number,
)


def main() -> None:
    setup = make_setup()
    print(f"setup: c = {setup.params.c:g}, weight exponent {setup.w_exp:g}, "
          f"half-length L = {setup.L:g}")

    gamma = 4.0
    split = limit_splitting(gamma, setup)
    print(f"limit rates at gamma = {gamma:g}:")
    print(f"  behind: {[f'{v:.3f}' for v in split.nu_minus]} "
          f"({split.k_minus} growing)")
    print(f"  ahead:  {[f'{v:.3f}' for v in split.nu_plus]} "
          f"({3 - split.k_plus} decaying)")
    print(f"mismatch determinant E({gamma:g}) = {evans(gamma, setup):.6f}")

    for g in (0.5, 2.0, 10.0 + 10.0j):
        print(f"E({g}) = {evans(g, setup):.6g}")

    contour = contour_of_S(r_min=0.05, r_max=50.0, base_n=120)
    print(f"winding a {contour.size}-node contour, radii 0.05 to 50 ...")
    winding, max_step = winding_number(setup, contour)
    print(f"winding number {winding}, largest argument step {max_step:.3f} rad")
    print("no zeros inside: nothing in the weighted point spectrum "
          "with positive real part" if winding == 0 else
          f"found {winding} zeros enclosed")

    # sanity check the counter itself on a function with a known zero
    circle = 0.5 + np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 65))
    circle[-1] = circle[0]
    w, _ = winding_number(None, circle, fn=lambda g: g)
    print(f"self-test, identity map around a circle about 0.5: winding {w}")


if __name__ == "__main__":
    main()
