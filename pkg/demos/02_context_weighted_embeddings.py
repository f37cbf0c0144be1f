"""Context-weighted sentence embeddings.

A word matters more when it is unusual for the corpus at hand. The
context model captures the corpus mean and covariance over word vectors;
a word's salience is its Mahalanobis distance from that mean. Sentence
vectors are salience-weighted averages, normalized to unit length, so
two sentences compare by a plain dot product.
"""

import numpy as np

from semfuse.corpus import CleanDoc
from semfuse.embed import (
    WordVectorTable,
    embed_sentence,
    fit_context,
    sim_cosal,
    word_salience,
)

rng = np.random.default_rng(42)

# a toy vocabulary: political words cluster, one outlier word far away
vocab = ["debt", "ceiling", "budget", "vote", "senate", "wildfire"]
vectors = {}
for i, word in enumerate(vocab[:-1]):
    vectors[word] = rng.normal(loc=0.0, scale=0.3, size=8)
vectors["wildfire"] = rng.normal(loc=3.0, scale=0.3, size=8)
table = WordVectorTable(dim=8, vectors=vectors)

docs = [
    CleanDoc(id="d1", tokens=("debt", "ceiling", "vote")),
    CleanDoc(id="d2", tokens=("budget", "vote", "senate")),
    CleanDoc(id="d3", tokens=("wildfire", "senate")),
]

ctx = fit_context(docs, table)
print(f"context ridge: {ctx.ridge:.6f}")

print("\nword salience in this corpus (higher = more distinctive):")
for word in vocab:
    print(f"  {word:10s} {word_salience(word, ctx, table):8.3f}")

e1 = embed_sentence(("debt", "ceiling", "vote"), ctx, table)
e2 = embed_sentence(("budget", "senate", "vote"), ctx, table)
e3 = embed_sentence(("wildfire",), ctx, table)
print(f"\nall sentence vectors have unit norm: "
      f"{np.linalg.norm(e1.vector):.6f}, {np.linalg.norm(e2.vector):.6f}")

print(f"\nsim(debt-ceiling-vote, budget-senate-vote) = {sim_cosal(e1.vector, e2.vector):.4f}")
print(f"sim(debt-ceiling-vote, wildfire)          = {sim_cosal(e1.vector, e3.vector):.4f}")

# when every usable word has zero salience the embedding falls back to
# the unweighted mean and flags it; normal sentences never do
flat = embed_sentence(("debt", "debt"), ctx, table)
print(f"\nfallback flag on a normal sentence: {flat.fallback}")
