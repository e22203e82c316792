"""Token-sorted partial string similarity on a Levenshtein basis."""
from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def token_sort(text: str) -> str:
    return " ".join(sorted(text.split()))


def partial_ratio(a: str, b: str) -> float:
    """Best ``1 - lev/len`` of the shorter string against equal-length windows of the longer.

    Returned on a 0..1 scale.
    """
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    if not short:
        return 1.0 if not long_ else 0.0
    width = len(short)
    best = 0
    for start in range(len(long_) - width + 1):
        sim = 1.0 - levenshtein(short, long_[start:start + width]) / width
        if sim > best:
            best = sim
            if best == 1.0:
                break
    return best


def partial_token_sort_ratio(a: str, b: str) -> int:
    """Similarity in 0..100 of the token-sorted forms of ``a`` and ``b``."""
    return int(round(100 * partial_ratio(token_sort(a), token_sort(b))))
