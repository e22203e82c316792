"""Seeded synthetic masked-sentence corpus with side-specific marker words."""
from __future__ import annotations

import numpy as np

from .corpus import BJP, OPP, PARTY, PER

NEUTRAL = (
    "the", "debate", "tonight", "people", "country", "said", "about", "today", "issue", "leader",
    "party", "nation", "question", "answer", "minister", "vote", "policy", "state", "media", "court",
    "government", "support", "public", "election", "rally", "speech", "statement", "week", "panel", "report",
)
MARKERS = {
    BJP: ("wave", "development", "nationalism", "mandate", "hindutva", "saffron", "vikas", "strong"),
    OPP: ("dynasty", "scam", "yatra", "secular", "alliance", "family", "protest", "coalition"),
}


def synthetic_corpus(n_per_label: int = 200, seed: int = 0, flip: float = 0.0) -> list[tuple[str, str]]:
    """Sentences with 3-9 neutral words, one mask token and 1-2 markers of their side.

    ``flip`` is the probability of swapping a label, for a non-separable corpus.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for label in (BJP, OPP):
        for _ in range(n_per_label):
            words = list(rng.choice(NEUTRAL, size=int(rng.integers(3, 10))))
            words += list(rng.choice(MARKERS[label], size=int(rng.integers(1, 3))))
            words.append(PER if rng.random() < 0.7 else PARTY)
            rng.shuffle(words)
            y = label
            if rng.random() < flip:
                y = OPP if label == BJP else BJP
            rows.append((" ".join(words).lower(), y))
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]
