"""Watch the knot transformation that carries Gauss nodes to spline nodes.

The source space is maximally discontinuous, so its optimal rule is
classical Gauss on every element.  Moving each knot linearly toward the
target configuration deforms the exactness system; the rule follows as
its root.  Here the source has one more node than the target needs: the
surplus node is pushed to the right end and its weight dies.
"""

import numpy as np

from splinegauss import source_rule, source_space, trace, uniform_space
from splinegauss.knots import knot_path, space_at

target = uniform_space(7, 1, 2, (0.0, 1.0))
src = source_space(target)
path = knot_path(src, target)

print(f"target: degree 7, C^1, two elements, dimension {target.dimension}")
print(f"source: {src.num_elements} discontinuous elements, "
      f"dimension {src.dimension}")
print(f"surplus basis functions: {path.extra} "
      f"-> {path.extra // 2} node must leave\n")

print("knot multisets along the path (breakpoints^multiplicity):")
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    sp = space_at(path, t)
    desc = "  ".join(
        f"{x:g}^{m}" for x, m in zip(sp.knots.breaks, sp.knots.mults)
    )
    print(f"  t={t:4.2f}:  {desc}")

start = source_rule(src)
result = trace(target)
rule = result.rule

print(f"\nsource rule: {start.num_nodes} nodes (4-point Gauss per element)")
print(f"target rule: {rule.num_nodes} nodes, "
      f"residual norm {rule.residual_norm:.2e}")
print(
    "the dying node finished at "
    f"{rule.meta['dropped_nodes'][0]:.12f} (the right end) with weight "
    f"{rule.meta['dropped_weights'][0]:.2e}"
)
print("\nfinal nodes: ", np.array_str(rule.nodes, precision=12))
print("final weights:", np.array_str(rule.weights, precision=12))
