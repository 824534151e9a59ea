"""
Pruning rare literals
=====================

Rank the included literals by how many clauses use them and drop the rarest
ones. Accuracy and rule size are compared over a sweep of fractions.
"""

from tmprune import synthetic
from tmprune.machine import ModelConfig, TsetlinMachine
from tmprune.pruning import DEFAULT_SWEEP, literal_frequencies, prune_sweep
from tmprune.rules import describe_clauses, select_clauses
from tmprune.text import build_vocabulary

data = synthetic.generate(seed=42)
train, test = synthetic.train_test_split(data)
vocab = build_vocabulary([d.tokens for d in train])
X_train, y_train = train.vectorize(vocab)
X_test, y_test = test.vectorize(vocab)
model = TsetlinMachine(ModelConfig(2, 200, T=20, s=5.0, seed=42), len(vocab), vocab.fingerprint)
model.fit(X_train, y_train, epochs=20)

counts = literal_frequencies(model)
print(f"{(counts > 0).sum()} of {counts.size} literals appear in at least one clause")

# %%
# Every fraction prunes the same base model, so the runs are independent.
print("fraction  pruned  includes  test acc")
for f, pruned, report in prune_sweep(model, DEFAULT_SWEEP, vocab):
    print(f"{f:8.2f}  {len(report.pruned):6d}  {literal_frequencies(pruned).sum():8d}  "
          f"{pruned.accuracy(X_test, y_test):.3f}")

# %%
# The densest clause before and after pruning 30%; removed literals are in brackets.
f, pruned, report = prune_sweep(model, [0.3], vocab)[0]
densest = select_clauses(model, count=1)
print(describe_clauses(model, vocab, densest, test.labels, pruned)[0])
print("first pruned literals:", ", ".join(report.names[:10]))
