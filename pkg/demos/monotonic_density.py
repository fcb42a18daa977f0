"""Angle-weighted Gaussian density along a graph flow.

The integral of the backward heat kernel divided by the angle cosine is
non-increasing along the flow; its decrease rate splits into three
nonnegative integrals (drift, curvature dissipation, angle gradient).  This
script runs a small Lagrangian graph flow, evaluates the weighted integral
at every stored sample, and prints the decomposition defect, which shrinks
at second order in the sample spacing.
"""

import argparse

import numpy as np

from mcf4d.flow import RunControls, run_flow
from mcf4d.functionals import GaussianWeight, monotonicity_scan
from mcf4d.scenarios import lagrangian_graph


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=32)
    parser.add_argument("--eps", type=float, default=0.1,
                        help="graph amplitude (default 0.1)")
    parser.add_argument("--steps", type=int, default=40)
    args = parser.parse_args()

    trace = run_flow(lagrangian_graph(args.nodes, args.nodes, args.eps),
                     RunControls(dt=2.5e-4, max_steps=args.steps, stride=2))
    weight = GaussianWeight(np.array([np.pi, 0.0, np.pi, 0.0]), 0.1)
    scan = monotonicity_scan(trace, weight, "lagrangian")

    print("   t          psi         d psi/dt     drift+diss+grad   defect")
    residual = scan.residual()
    for j in range(1, len(scan.times) - 1):
        k = j - 1
        rhs = (scan.rhs_drift[k] + scan.rhs_dissipation[k]
               + scan.rhs_gradient[k])
        print(f"{scan.times[j]:8.5f}  {scan.psi[j]:11.8f}  {scan.lhs[k]:+.4e}"
              f"   {-rhs:+.4e}      {residual[k]:+.2e}")

    print(f"\npsi fell from {scan.psi[0]:.8f} to {scan.psi[-1]:.8f}; "
          f"max d psi/dt = {scan.lhs.max():.3e} (never positive)")
    print(f"worst decomposition defect: {np.abs(residual).max():.3e}")


if __name__ == "__main__":
    main()
