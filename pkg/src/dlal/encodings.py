"""Standard Church encodings used as the built-in corpus."""

from __future__ import annotations

from .fterm import FTerm, FType, alpha_normalize, parse_term, parse_type, typecheck

WORD_TYPE = "forall a. (a -> a) -> (a -> a) -> (a -> a)"
NAT_TYPE = "forall a. (a -> a) -> a -> a"

W_F: FType = parse_type(WORD_TYPE)
N_F: FType = parse_type(NAT_TYPE)

IDENTITY = "/\\a. \\x:a. x"

REV = f"""
\\l:{WORD_TYPE}. /\\b. \\so:b -> b. \\si:b -> b.
  l [b -> b]
    (\\a:b -> b. \\x:b. a (so x))
    (\\a:b -> b. \\x:b. a (si x))
    ((/\\c. \\z:c. z) [b])
"""

APPEND = f"""
\\u:{WORD_TYPE}. \\v:{WORD_TYPE}. /\\a. \\so:a -> a. \\si:a -> a. \\x:a.
  u [a] so si (v [a] so si x)
"""

DOUBLE = f"""
\\m:{NAT_TYPE}. /\\a. \\f:a -> a. \\x:a. m [a] f (m [a] f x)
"""


def word_source(bits: str) -> str:
    """Source of the Church word for bits, first letter outermost."""
    if any(c not in "01" for c in bits):
        raise ValueError(f"not a binary word: {bits!r}")
    body = "x"
    for c in reversed(bits):
        body = f"{'so' if c == '0' else 'si'} ({body})"
    return f"/\\a. \\so:a -> a. \\si:a -> a. \\x:a. {body}"


def numeral_source(k: int) -> str:
    body = "x"
    for _ in range(k):
        body = f"f ({body})"
    return f"/\\a. \\f:a -> a. \\x:a. {body}"


def exp_source() -> str:
    return f"\\n:{NAT_TYPE}. n [{NAT_TYPE}] ({DOUBLE}) ({numeral_source(1)})"


def apply_source(fun: str, *args: str) -> str:
    return " ".join(f"({s.strip()})" for s in (fun,) + args)


def word(bits: str) -> FTerm:
    return alpha_normalize(parse_term(word_source(bits)))


def numeral(k: int) -> FTerm:
    return alpha_normalize(parse_term(numeral_source(k)))


def rev() -> FTerm:
    return alpha_normalize(parse_term(REV))


def rev_applied(bits: str) -> FTerm:
    return alpha_normalize(parse_term(apply_source(REV, word_source(bits))))


def exp(k: int = 2) -> FTerm:
    """The exponential program run on numeral k; the bare function is ``exp-fn``."""
    return alpha_normalize(parse_term(apply_source(exp_source(), numeral_source(k))))


_NAMED = {
    "id": IDENTITY,
    "rev": REV,
    "append": APPEND,
    "double": DOUBLE,
    "exp": apply_source(exp_source(), numeral_source(2)),
    "exp-fn": exp_source(),
    "rev-rev": f"\\w:{WORD_TYPE}. ({REV}) (({REV}) w)",
    "append-rev": f"\\w:{WORD_TYPE}. ({APPEND}) (({REV}) w) w",
    "cons0": f"\\w:{WORD_TYPE}. /\\a. \\so:a -> a. \\si:a -> a. \\x:a. so (w [a] so si x)",
    "rev-1010": apply_source(REV, word_source("1010")),
}


# small enough for exhaustive enumeration of their free decorations
_SMALL = {
    "lin-id": "\\x:a. x",
    "id2": "/\\a. /\\b. \\x:a. x",
    "id-forall": "/\\a. \\x:forall b. b. x",
}
_NAMED.update(_SMALL)


def encodings() -> dict:
    """Named corpus sources; words and numerals are produced on demand."""
    return dict(_NAMED)


def lookup(name: str) -> str:
    """Source text for a corpus name such as ``rev``, ``word:1010``, ``numeral:3``."""
    if name.startswith("word:"):
        return word_source(name[5:])
    if name.startswith("numeral:"):
        return numeral_source(int(name[8:]))
    if name.startswith("rev:"):
        return apply_source(REV, word_source(name[4:]))
    try:
        return _NAMED[name]
    except KeyError:
        raise KeyError(f"unknown corpus entry {name!r}") from None


def load(name: str) -> FTerm:
    t = alpha_normalize(parse_term(lookup(name)))
    typecheck(t)
    return t
