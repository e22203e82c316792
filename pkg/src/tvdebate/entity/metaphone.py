"""Classic (original, 1990) Metaphone encoding.

Rules, applied left to right on the upper-cased letters of one word:

* doubled adjacent letters collapse, except ``CC``
* initial ``KN GN PN AE WR`` drop their first letter, initial ``X`` -> ``S``,
  initial ``WH`` -> ``W``
* vowels are kept only in first position
* ``B`` silent in a final ``MB``
* ``C`` -> ``X`` in ``CIA``/``CH`` (``K`` in ``SCH``), ``S`` before ``I E Y``,
  silent in ``SCI SCE SCY``, otherwise ``K``
* ``D`` -> ``J`` before ``GE GY GI``, otherwise ``T``
* ``G`` silent in ``GH`` not before a vowel and in final ``GN``/``GNED``,
  ``J`` before ``I E Y``, otherwise ``K``
* ``H`` silent after ``C S P T G`` and after a vowel when no vowel follows
* ``K`` silent after ``C``; ``PH`` -> ``F``; ``Q`` -> ``K``; ``V`` -> ``F``;
  ``Z`` -> ``S``
* ``S`` -> ``X`` in ``SH SIO SIA``; ``T`` -> ``X`` in ``TIA TIO``, ``0`` in
  ``TH``, silent in ``TCH``
* ``W`` and ``Y`` are kept only before a vowel; ``X`` -> ``KS``
"""
from __future__ import annotations

import re

VOWELS = frozenset("AEIOU")
_FRONT = frozenset("EIY")


def metaphone_word(word: str) -> str:
    w = re.sub(r"[^A-Z]", "", word.upper())
    if not w:
        return ""
    # collapse doubles except C
    letters = [w[0]]
    for ch in w[1:]:
        if ch != letters[-1] or ch == "C":
            letters.append(ch)
    w = "".join(letters)

    if w[:2] in ("KN", "GN", "PN", "AE", "WR"):
        w = w[1:]
    out = []
    i = 0
    if w[0] == "X":
        out.append("S")
        i = 1
    elif w[:2] == "WH":
        out.append("W")
        i = 2

    n = len(w)

    def at(k: int) -> str:
        return w[k] if 0 <= k < n else ""

    while i < n:
        ch = w[i]
        prev, nxt, nxt2 = at(i - 1), at(i + 1), at(i + 2)
        step = 1
        if ch in VOWELS:
            if i == 0:
                out.append(ch)
        elif ch == "B":
            if not (prev == "M" and i == n - 1):
                out.append("B")
        elif ch == "C":
            if nxt == "I" and nxt2 == "A":
                out.append("X")
            elif nxt == "H":
                out.append("K" if prev == "S" else "X")
                step = 2
            elif nxt in _FRONT:
                if prev != "S":
                    out.append("S")
            else:
                out.append("K")
        elif ch == "D":
            if nxt == "G" and nxt2 in _FRONT:
                out.append("J")
                step = 2
            else:
                out.append("T")
        elif ch == "G":
            if nxt == "H" and nxt2 and nxt2 not in VOWELS:
                step = 2
            elif nxt == "N" and (i + 2 == n or w[i + 2:] == "NED"):
                pass
            elif nxt in _FRONT:
                out.append("J")
            else:
                out.append("K")
        elif ch == "H":
            if prev in ("C", "S", "P", "T", "G"):
                pass
            elif prev in VOWELS and nxt not in VOWELS:
                pass
            else:
                out.append("H")
        elif ch == "K":
            if prev != "C":
                out.append("K")
        elif ch == "P":
            if nxt == "H":
                out.append("F")
                step = 2
            else:
                out.append("P")
        elif ch == "Q":
            out.append("K")
        elif ch == "S":
            if nxt == "H":
                out.append("X")
                step = 2
            elif nxt == "I" and nxt2 in ("O", "A"):
                out.append("X")
            else:
                out.append("S")
        elif ch == "T":
            if nxt == "I" and nxt2 in ("O", "A"):
                out.append("X")
            elif nxt == "H":
                out.append("0")
                step = 2
            elif not (nxt == "C" and nxt2 == "H"):
                out.append("T")
        elif ch == "V":
            out.append("F")
        elif ch in ("W", "Y"):
            if nxt in VOWELS:
                out.append(ch)
        elif ch == "X":
            out.append("KS")
        elif ch == "Z":
            out.append("S")
        else:
            out.append(ch)  # F J L M N R
        i += step
    return "".join(out)


def phonetic_key(name: str) -> str:
    """Metaphone code of every whitespace-separated token, space-joined.

    >>> phonetic_key("syed asad abbas")
    'SYT AST ABS'
    """
    codes = (metaphone_word(tok) for tok in re.split(r"[\s\-]+", name))
    return " ".join(c for c in codes if c)
