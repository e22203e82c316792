"""
Masked sentences, a small classifier and integrated gradients
=============================================================
"""

# %%
import numpy as np

from tvdebate.bias import (
    BiasCorpusConfig,
    attribute_corpus,
    build_corpus,
    completeness_gap,
    integrated_gradients,
    load_stopwords,
    rank_tokens,
    tokenize,
    train_classifier,
)
from tvdebate.bias.synth import synthetic_corpus

cfg = BiasCorpusConfig.load()

# %% sentences about one side only, without negation, with names masked
text = ("Modi won the vote. Rahul and Modi met. The Congress will not apologize. "
        "Rahul Gandhi led the yatra. The BJP held a rally.")
for row in build_corpus([text], cfg):
    print(row)

# %% a mean-pooled embedding classifier on a synthetic separable corpus
corpus = synthetic_corpus(200, seed=0)
model, metrics = train_classifier(corpus, seed=0)
print({k: metrics[k] for k in ("train_accuracy", "val_accuracy", "test_accuracy", "epochs_run")})

# %% per-token attributions toward P(BJP)
sentence = corpus[0][0]
for tok, score in zip(tokenize(sentence), integrated_gradients(model, sentence, 256)):
    print(f"{tok:12s} {score:+.4f}")

# %% the right Riemann sum converges at rate 1/m on the sigmoid output; on the logit it is exact
for m in (16, 64, 256, 1024, 4096):
    print(m, f"{completeness_gap(model, sentence, m):.2e}", f"{completeness_gap(model, sentence, m, 'logit'):.1e}")

# %% tokens ranked by mean attribution toward each label
table = rank_tokens(attribute_corpus(model, synthetic_corpus(100, seed=5), steps=32), load_stopwords(), min_freq=20)
for label, rows in sorted(table.items()):
    print(label, [(r.token, round(r.score, 3)) for r in rows[:5]])
