"""Training and evaluating the classifier on a synthetic corpus.

The generator draws rows from documented per-label feature marginals, so the
demo is self-contained and reproducible; swap in a real feature file for
production use.
"""

from freephish.forest import (ForestParams, evaluate, predict,
                              split_train_test, train_forest)
from freephish.synthetic import make_synthetic_dataset

data = make_synthetic_dataset(2000, seed=7)
train, test = split_train_test(data, fraction=0.7, seed=7)
print(f"corpus: {len(data)} rows -> train {len(train)} / test {len(test)} "
      "(stratified)")

forest = train_forest(train, ForestParams(n_trees=100, seed=7))
print(f"trained {forest.params.n_trees} trees, model_version {forest.model_version}")

metrics = evaluate(forest, test)
print(f"\nheld-out accuracy: {metrics.accuracy:.4f}")
for label, cm in sorted(metrics.per_class.items()):
    print(f"  {label:<9} precision {cm.precision:.3f}  recall {cm.recall:.3f}  "
          f"f1 {cm.f1:.3f}")
print(f"  roc_auc  {metrics.roc_auc:.4f}")
print(f"  confusion {metrics.confusion}")

vector, true_label = test.rows[0]
verdict = predict(forest, vector)
print(f"\none verdict: label={verdict.label} score={verdict.score:.2f} "
      f"(true label: {true_label})")

# Determinism: the same data, params and seed always grow the same forest,
# serial or parallel.
again = train_forest(train, ForestParams(n_trees=100, seed=7), n_jobs=4)
print(f"parallel retrain is bit-identical: {again.model_version == forest.model_version}")
