"""The degenerate extension problem and its Dirichlet-to-Neumann map.

A boundary mode e^(i xi x) extends into the upper half-space as a solution
of div(y^a grad U) = 0 with a = 1 - 2s.  The weighted normal derivative at
y = 0, scaled by the trace constant, must return |xi|^(2s): the fractional
Laplacian realized as a local flux.  This script solves the one-dimensional
mode problem on a graded mesh and watches the flux converge under
refinement.
"""

from conflap import FracParams, d_s_const, d_star_const, solve_extension_mode


def main():
    print("Dirichlet-to-Neumann flux vs the exact multiplier |xi|^(2s):")
    print(f"{'s':>5}  {'xi':>5}  {'dtn':>14}  {'|xi|^2s':>14}  {'rel err':>10}")
    for s in (0.2, 0.5, 0.8):
        p = FracParams(3, s)
        for xi in (0.5, 1.0, 2.0, 4.0):
            sol = solve_extension_mode(p, xi)
            exact = xi ** (2.0 * s)
            rel = abs(sol.dtn - exact) / exact
            print(f"{s:>5.2f}  {xi:>5.2f}  {sol.dtn:>14.8f}  "
                  f"{exact:>14.8f}  {rel:>10.2e}")
    print()

    print("mesh refinement halves the grading step each row (s = 0.3, xi = 2):")
    p = FracParams(3, 0.3)
    exact = 2.0 ** 0.6
    for mesh_size in (300, 600, 1200, 2400):
        sol = solve_extension_mode(p, 2.0, mesh_size=mesh_size)
        rel = abs(sol.dtn - exact) / exact
        print(f"  K = {mesh_size:>5}: dtn = {sol.dtn:.10f}, rel err = {rel:.3e}")
    print()

    print("trace constants tie the flux to the operator normalization:")
    for s in (0.2, 0.5, 0.8):
        ds = d_s_const(s)
        dstar = d_star_const(s)
        print(f"  s = {s}: d_s = {ds:>14.10f}, d*_s = {dstar:>14.10f}, "
              f"-d_s / (2s) = {-ds / (2.0 * s):>14.10f}")


if __name__ == "__main__":
    main()
