"""Coarse-level classification: plain vs certainty-weighted map training.

Five synthetic pattern classes (arch, tented arch, left/right loop, whorl)
are generated from a zero-pole orientation model, flattened into
256-component direction vectors around the core, and classified with a
10x10 self-organizing map. On clean fields both trainers do well; once a
random 40% of each vector's blocks lose their certainty and pick up noise
directions, the certainty-weighted variant holds up far better because it
blends unreliable components toward the training mean and excludes them
from the winner distance.
"""

import time

from fpverify import (
    FeatureVector,
    FingerClass,
    SynthConfig,
    TrainConfig,
    classify,
    extract_feature_vector,
    gen_synthetic_orientation,
    train_msom,
    train_som,
)
from fpverify.synth import degrade_feature_vector


def dataset(per_class, seed0):
    vectors = []
    for ci, cls in enumerate(FingerClass):
        for j in range(per_class):
            field, core = gen_synthetic_orientation(
                SynthConfig(finger_class=cls, seed=seed0 + ci * 1000 + j)
            )
            fv = extract_feature_vector(field, core)
            vectors.append(FeatureVector(fv.directions, fv.certainties, class_label=cls))
    return vectors


def accuracy(som_map, vectors, weighted):
    hits = 0
    for v in vectors:
        label, _ = classify(som_map, v.directions, v.certainties if weighted else None)
        hits += label is v.class_label
    return hits / len(vectors)


train = dataset(12, 0)       # 60 training fields
test = dataset(4, 500_000)   # 20 held-out fields
print(f"{len(train)} training / {len(test)} test vectors, 5 classes")

t0 = time.time()
clean_map = train_som(train, 10, TrainConfig(epochs=40, seed=0))
print(f"\nclean fields, plain training ({time.time() - t0:.1f}s): "
      f"test accuracy {accuracy(clean_map, test, weighted=False):.0%}")

print("\ndegraded fields (40% of blocks zero-certainty + noise):")
print(f"{'seed':>6} {'plain':>8} {'weighted':>9}")
for seed in range(5):
    dtrain = [degrade_feature_vector(v, 0.4, seed * 10_000 + i) for i, v in enumerate(train)]
    dtest = [degrade_feature_vector(v, 0.4, seed * 20_000 + i + 777) for i, v in enumerate(test)]
    cfg = TrainConfig(epochs=40, seed=seed)
    plain = accuracy(train_som(dtrain, 10, cfg), dtest, weighted=False)
    weighted = accuracy(train_msom(dtrain, 10, cfg), dtest, weighted=True)
    print(f"{seed:>6} {plain:>8.0%} {weighted:>9.0%}")
