"""Porter suffix-stripping stemmer.

This follows the canonical reference distribution of the algorithm,
including its two documented departures from the original write-up
("bli" -> "ble" in step 2 rather than "abli" -> "able", and the extra
"logi" -> "log" rule) and the rule that words of length one or two are
left alone.  The test suite holds this implementation to 100% agreement
with the distribution's vocabulary/output sample.

Input is expected to be a nonempty lowercase ASCII-alphabetic word;
anything else is returned unchanged by :func:`stem`.
"""

_VOWELS = "aeiou"


class _Word:
    """Mutable stemming buffer: the word plus the working end index ``k``
    and the suffix split point ``j`` maintained by ``ends``."""

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str):
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def is_consonant(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return True if i == 0 else not self.is_consonant(i - 1)
        return True

    def measure(self) -> int:
        """Number of vowel-consonant sequences in b[0..j]."""
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self.is_consonant(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self.is_consonant(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self.is_consonant(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.is_consonant(i) for i in range(self.j + 1))

    def double_consonant(self, i: int) -> bool:
        if i < 1 or self.b[i] != self.b[i - 1]:
            return False
        return self.is_consonant(i)

    def cvc(self, i: int) -> bool:
        """consonant-vowel-consonant ending at i, last not w/x/y."""
        if (
            i < 2
            or not self.is_consonant(i)
            or self.is_consonant(i - 1)
            or not self.is_consonant(i - 2)
        ):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s: str) -> bool:
        length = len(s)
        if length > self.k + 1 or self.b[self.k - length + 1 : self.k + 1] != s:
            return False
        self.j = self.k - length
        return True

    def set_to(self, s: str):
        self.b = self.b[: self.j + 1] + s + self.b[self.j + 1 + len(s) :]
        self.k = self.j + len(s)

    def replace_if_m(self, s: str):
        if self.measure() > 0:
            self.set_to(s)


def _step1ab(w: _Word):
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.set_to("i")
        elif w.b[w.k - 1] != "s":
            w.k -= 1
    if w.ends("eed"):
        if w.measure() > 0:
            w.k -= 1
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        if w.ends("at"):
            w.set_to("ate")
        elif w.ends("bl"):
            w.set_to("ble")
        elif w.ends("iz"):
            w.set_to("ize")
        elif w.double_consonant(w.k):
            w.k -= 1
            if w.b[w.k] in "lsz":
                w.k += 1
        elif w.measure() == 1 and w.cvc(w.k):
            w.set_to("e")


def _step1c(w: _Word):
    if w.ends("y") and w.vowel_in_stem():
        w.b = w.b[: w.k] + "i" + w.b[w.k + 1 :]


_STEP2 = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3 = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}


def _map_step(w: _Word, table, key_offset: int):
    suffixes = table.get(w.b[w.k - key_offset])
    if not suffixes:
        return
    for suffix, replacement in suffixes:
        if w.ends(suffix):
            w.replace_if_m(replacement)
            return


_STEP4 = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _step4(w: _Word):
    suffixes = _STEP4.get(w.b[w.k - 1])
    if not suffixes:
        return
    for suffix in suffixes:
        if w.ends(suffix):
            # "ion" only counts after s or t
            if suffix == "ion" and w.b[w.j] not in "st":
                continue
            if w.measure() > 1:
                w.k = w.j
            return


def _step5(w: _Word):
    w.j = w.k
    if w.b[w.k] == "e":
        m = w.measure()
        if m > 1 or (m == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.double_consonant(w.k) and w.measure() > 1:
        w.k -= 1


def stem(term: str) -> str:
    """Stem a lowercase alphabetic term; 1- and 2-letter words and terms
    containing anything but ASCII a-z are returned unchanged."""
    if len(term) <= 2 or not term.isascii() or not term.isalpha():
        return term
    w = _Word(term)
    _step1ab(w)
    _step1c(w)
    _map_step(w, _STEP2, 1)
    _map_step(w, _STEP3, 0)
    _step4(w)
    _step5(w)
    return w.b[: w.k + 1]
