"""Node-doubling convergence of the outcome-probability integral and completeness defect."""
from cvteleport.channel import TeleportParams, completeness_defect
from cvteleport.fock import basis_state
from cvteleport.quadrature import polar_grid
from cvteleport.sampling import integrate_density_with_error

for q in (0.0, 0.5, 0.8):
    p = TeleportParams(q)
    print(f"q = {q}, radius {p.default_radius:.3f}")
    for nr, na in ((6, 4), (12, 8), (24, 16), (48, 32), (96, 64)):
        value, err = integrate_density_with_error(p, basis_state(1), polar_grid(p.default_radius, nr, na))
        defect = completeness_defect(p, p.default_radius, (nr, na), block=8)
        print(f"  {nr:3d} x {na:3d}: |P - 1| = {abs(value - 1):.3e} (est {err:.1e}), completeness defect {defect:.3e}")
