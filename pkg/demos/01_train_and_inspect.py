"""
Training a Tsetlin Machine on planted keywords
==============================================

Generate the synthetic review task, train a two-class machine and read the
learned clauses back as rules.
"""

import numpy as np

from tmprune import synthetic
from tmprune.machine import ModelConfig, TsetlinMachine
from tmprune.rules import describe_clauses, select_clauses
from tmprune.text import build_vocabulary

# 2000 short documents; each holds 1-3 keywords of its own class among noise
# and filler words.
data = synthetic.generate(num_docs=2000, seed=42)
train, test = synthetic.train_test_split(data)
print(test.documents[0].text, "->", test.labels[test.documents[0].label])

# Bag-of-words features over the 200-word vocabulary.
vocab = build_vocabulary([d.tokens for d in train])
X_train, y_train = train.vectorize(vocab)
X_test, y_test = test.vectorize(vocab)
print("features:", X_train.shape)

model = TsetlinMachine(ModelConfig(num_classes=2, clauses_per_class=200, T=20, s=5.0, seed=42),
                       len(vocab), vocab.fingerprint)
model.fit(X_train, y_train, epochs=20,
          callback=lambda epoch, m: print(f"epoch {epoch + 1:2d}  train acc {m.accuracy(X_train, y_train):.3f}"))
print("test accuracy:", model.accuracy(X_test, y_test))

# %%
# Clauses are conjunctions of literals. The ones firing on a document explain
# its prediction.
x = X_test[0]
print("prediction:", test.labels[model.predict(x)])
for line in describe_clauses(model, vocab, select_clauses(model, x, count=5), test.labels):
    print(line)

# %%
# Most clauses carry many literals; the count distribution shows how dense.
sizes = model.literal_counts()
print("literals per clause: median", int(np.median(sizes)), "max", int(sizes.max()))
