"""Infinite-domain rules: the periodic patterns finite rules converge to.

Far from the boundary of a long uniform mesh, the optimal nodes and
weights repeat with a period of one element (odd continuity) or two
elements (even continuity).  The patterns solve a small exactness system
over one period; several have closed-form constants.
"""

import numpy as np

from splinegauss import (
    asymptotic_rule,
    pattern_residual,
    solve_asymptotic_system,
    trace,
    uniform_space,
)

for d, c in [(5, 1), (7, 1), (9, 1), (5, 0), (7, 0), (5, 2), (5, 3), (7, 3)]:
    pattern = asymptotic_rule(d, c)
    print(f"degree {d}, C^{c}: period {pattern.period} element(s), "
          f"{pattern.nodes_per_element:g} nodes/element")
    print(f"  offsets: {np.array_str(pattern.offsets, precision=14)}")
    print(f"  weights: {np.array_str(pattern.weights, precision=14)}")
    print(f"  periodic exactness defect: {pattern_residual(pattern):.1e}")

# the periodic solver rediscovers the tabulated constants
solved = solve_asymptotic_system(7, 1)
d1 = (7 - np.sqrt(7)) / 14
print("\nperiodic solver, degree 7 C^1:")
print(f"  interior offset {solved.offsets[1]:.17f} vs (7-sqrt7)/14 = {d1:.17f}")
print(f"  knot weight     {solved.weights[0]:.17f} vs 37/135      = {37/135:.17f}")

# finite rules converge to the pattern away from the boundary
result = trace(uniform_space(7, 1, 30))
pattern = asymptotic_rule(7, 1)
grid, gw = pattern.positions_in(0.0, 30.0)
print("\nconvergence of the N=30 rule toward the pattern (left half):")
for e in (1, 2, 3, 4, 5):
    nodes = [x for x in result.rule.nodes if e - 1 <= x < e]
    devs = [min(abs(x - g) for g in grid) for x in nodes]
    print(f"  element {e}: max node deviation {max(devs):.1e}")
