"""Show that the graph index survives translation and rotation.

Moving or rotating an impression about its core does not change which
cluster centroids are nearest neighbors, so the four-parameter index string
comes back byte-identical. Scaling is deliberately not covered: the
centroid distances it would change feed only the edge choice, but no
mechanism normalizes them, so the toolkit restricts itself to rigid motion.
"""

import math

from fpverify import (
    RigidTransform,
    SynthConfig,
    apply_transform,
    compute_signature,
    gen_synthetic_minutiae,
)

s = gen_synthetic_minutiae(SynthConfig(n_minutiae=30, seed=7))
baseline = compute_signature(s, k=5)
print(f"baseline index: {baseline.index_key}")

print("\ntranslations:")
for dx, dy in [(40.0, -12.5), (-300.0, 77.0), (1234.5, 6789.0)]:
    moved = apply_transform(s, RigidTransform(translation=(dx, dy)))
    key = compute_signature(moved, k=5).index_key
    print(f"  shift ({dx:8.1f}, {dy:8.1f}) -> {key}  "
          f"{'identical' if key == baseline.index_key else 'DIFFERENT'}")

print("\nrotations about the core:")
for deg in (15, 90, 137, 261):
    rotated = apply_transform(
        s,
        RigidTransform(rotation=math.radians(deg), pivot=(s.core.x, s.core.y)),
    )
    key = compute_signature(rotated, k=5).index_key
    print(f"  {deg:3d} degrees -> {key}  "
          f"{'identical' if key == baseline.index_key else 'DIFFERENT'}")

print("\ncombined motion:")
both = apply_transform(
    s,
    RigidTransform(rotation=2.2, translation=(-55.0, 19.0), pivot=(s.core.x, s.core.y)),
)
print(f"  rotate + translate -> {compute_signature(both, k=5).index_key}")
