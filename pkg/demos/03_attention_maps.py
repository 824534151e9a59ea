"""
Token attention maps and human agreement
========================================

Score each token by how much removing it lowers the model's confidence, then
compare those maps with the planted keyword masks, which play the role of
human rationales.
"""

from tmprune import synthetic
from tmprune.evaluation import annotator_maps, pairwise_table
from tmprune.explain import tam, tams
from tmprune.machine import ModelConfig, TsetlinMachine
from tmprune.pruning import prune
from tmprune.text import build_vocabulary

data = synthetic.generate(seed=42, num_annotators=1)
train, test = synthetic.train_test_split(data)
vocab = build_vocabulary([d.tokens for d in train])
X, y = train.vectorize(vocab)
model = TsetlinMachine(ModelConfig(2, 200, T=20, s=5.0, seed=42), len(vocab), vocab.fingerprint)
model.fit(X, y, epochs=20)
pruned, _ = prune(model, 0.3, vocab)

# %%
# One document: per-token comprehensiveness scores next to the keyword mask.
doc = test.documents[0]
amap = tam(model, vocab, doc)
for token, score, ham in zip(doc.tokens, amap.scores, doc.hams[0]):
    print(f"{token:12s} {score:5.2f} {'*' if ham else ''}")

# %%
# Dataset-level agreement for both models. Higher is closer to the human maps.
hams = {"HAM1": annotator_maps(test, 0)}
machines = {
    "vanilla TM": tams(model, vocab, test.documents),
    "TM (30%)": tams(pruned, vocab, test.documents),
}
report = pairwise_table(hams, machines, "comprehensiveness", dataset="synthetic", fractions={"TM (30%)": 0.3})
print(report.format_table())
