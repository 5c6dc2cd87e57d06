"""Hybrid rules: traced boundary elements plus the asymptotic interior.

For low continuities only a few boundary elements differ from the
asymptotic values, so a rule for any large mesh can be assembled from a
small traced reference plus the repeating pattern -- no large solve.
The residual norm on the actual target space shows what that costs.
"""

import time

from splinegauss import hybrid_rule, trace, uniform_space

# C^0 quintics need a single special boundary element
t0 = time.monotonic()
rule = hybrid_rule(5, 0, 1001, boundary_depth=1)
elapsed = time.monotonic() - t0
print(f"degree 5, C^0, N=1001: {rule.num_nodes} nodes assembled "
      f"in {elapsed:.2f}s")
print(f"  residual norm on the target space: {rule.residual_norm:.2e}")

# C^1 needs four boundary elements; compare against a direct trace
hybrid = hybrid_rule(5, 1, 10, boundary_depth=4)
direct = trace(uniform_space(5, 1, 10)).rule
node_diff = max(abs(a - b) for a, b in zip(hybrid.nodes, direct.nodes))
weight_diff = max(abs(a - b) for a, b in zip(hybrid.weights, direct.weights))
print(f"\ndegree 5, C^1, N=10: hybrid vs direct trace")
print(f"  max node difference   {node_diff:.1e}")
print(f"  max weight difference {weight_diff:.1e}")

# higher continuity converges slowly: a shallow boundary shows up in the
# residual instead of being hidden
shallow = hybrid_rule(5, 2, 31, boundary_depth=1)
deep = hybrid_rule(5, 2, 41, boundary_depth=15)
print(f"\ndegree 5, C^2: boundary depth 1  -> residual {shallow.residual_norm:.1e}")
print(f"degree 5, C^2: boundary depth 15 -> residual {deep.residual_norm:.1e}")
