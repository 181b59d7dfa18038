"""Random string ensembles, seeding, and subsequence utilities.

Strings are ``numpy.uint8`` arrays of symbols in ``[0, k)``.  Anywhere a
string is accepted, a ``str`` of base-36 digits (``"0011"``, ``"2a"``) or
any integer sequence works as well.

Every random string is drawn from its own Philox stream, keyed by the
master seed and a path of integer indices.  Because numpy's bounded
integer sampling consumes the stream sequentially, a string of length
``n`` is always a prefix of the same string drawn at length ``n' > n``;
this is what lets seeded ensembles grow on demand.
"""
from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ValidationError

SYMBOL_DTYPE = np.uint8
MAX_ALPHABET = 256
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

SymbolsLike = Union[str, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class Params:
    """Alphabet size ``k``, number of strings ``d`` and string length ``n``."""

    k: int
    d: int
    n: int

    def __post_init__(self):
        if self.k < 2 or self.k > MAX_ALPHABET:
            raise ValidationError(f"alphabet size k must be in [2, {MAX_ALPHABET}], got {self.k}")
        if self.d < 1:
            raise ValidationError(f"number of strings d must be >= 1, got {self.d}")
        if self.n < 0:
            raise ValidationError(f"string length n must be >= 0, got {self.n}")


@dataclass(frozen=True)
class Seed:
    """A master seed plus a derivation path.

    ``Seed(m).child(i)`` is the seed of trial ``i``; the child state is a
    pure function of ``(m, i)`` via ``numpy.random.SeedSequence`` spawn keys.
    """

    master: int
    path: tuple = field(default=())

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise ValidationError(f"master seed must be a 64-bit unsigned integer, got {self.master}")

    @classmethod
    def fresh(cls) -> "Seed":
        return cls(secrets.randbits(64))

    @classmethod
    def parse(cls, text: str) -> "Seed":
        master, _, path = str(text).partition(":")
        try:
            return cls(int(master), tuple(int(p) for p in path.split(".")) if path else ())
        except ValueError:
            raise ValidationError(f"cannot parse seed {text!r}") from None

    def child(self, i: int) -> "Seed":
        return Seed(self.master, self.path + (int(i),))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.sequence()))

    def __str__(self):
        if not self.path:
            return str(self.master)
        return f"{self.master}:" + ".".join(str(p) for p in self.path)


def as_symbols(x: SymbolsLike) -> np.ndarray:
    """Convert a base-36 string or integer sequence to a uint8 symbol array."""
    if isinstance(x, np.ndarray) and x.dtype == SYMBOL_DTYPE:
        return x
    if isinstance(x, str):
        try:
            vals = [_DIGITS.index(c) for c in x.lower()]
        except ValueError:
            raise ValidationError(f"string {x!r} contains a non base-36 character") from None
        return np.array(vals, dtype=SYMBOL_DTYPE)
    arr = np.asarray(x)
    if arr.size and (arr.min() < 0 or arr.max() >= MAX_ALPHABET):
        raise ValidationError("symbols must lie in [0, 256)")
    return arr.astype(SYMBOL_DTYPE).reshape(-1)


def to_text(x: SymbolsLike) -> str:
    """Render symbols as base-36 characters."""
    arr = as_symbols(x)
    if arr.size and arr.max() >= len(_DIGITS):
        raise ValidationError("only alphabets with k <= 36 have a text form")
    return "".join(_DIGITS[s] for s in arr.tolist())


@dataclass(frozen=True, eq=False)
class StringEnsemble:
    """``d`` symbol strings plus the parameters (and seed) that produced them.

    ``seed`` is ``None`` for explicit, user-supplied strings.
    """

    strings: tuple
    params: Params
    seed: Seed | None = None

    def __post_init__(self):
        for s in self.strings:
            s.flags.writeable = False
            if s.size and s.max() >= self.params.k:
                raise ValidationError(f"symbol {int(s.max())} outside alphabet [0, {self.params.k})")

    @classmethod
    def explicit(cls, strings: Iterable[SymbolsLike], k: int | None = None) -> "StringEnsemble":
        arrs = tuple(np.array(as_symbols(s)) for s in strings)
        if not arrs:
            raise ValidationError("an ensemble needs at least one string")
        if k is None:
            k = max(2, max((int(a.max()) + 1 for a in arrs if a.size), default=2))
        n = max(a.size for a in arrs)
        return cls(arrs, Params(k, len(arrs), n), None)

    @property
    def d(self) -> int:
        return len(self.strings)

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def lengths(self) -> tuple:
        return tuple(s.size for s in self.strings)

    @property
    def is_seeded(self) -> bool:
        return self.seed is not None

    def extended(self, n: int) -> "StringEnsemble":
        """Regenerate a seeded ensemble at length ``n``; shorter strings stay prefixes."""
        if self.seed is None:
            raise ValidationError("explicit ensembles cannot be extended")
        return sample_ensemble(Params(self.k, self.d, n), self.seed)

    def prefixes(self, lengths: Sequence[int]) -> "StringEnsemble":
        strings = tuple(s[:i].copy() for s, i in zip(self.strings, lengths))
        return StringEnsemble(strings, Params(self.k, self.d, max(lengths, default=0)), None)

    def texts(self) -> list:
        return [to_text(s) for s in self.strings]

    def __eq__(self, other):
        if not isinstance(other, StringEnsemble):
            return NotImplemented
        return (self.params == other.params and self.seed == other.seed
                and all(np.array_equal(a, b) for a, b in zip(self.strings, other.strings)))

    def to_text(self) -> str:
        """Header ``k d n seed`` then one base-36 string per line."""
        seed = "explicit" if self.seed is None else str(self.seed)
        lines = [f"{self.k} {self.d} {self.params.n} {seed}"]
        lines += self.texts()
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StringEnsemble":
        lines = text.splitlines()
        if not lines:
            raise ValidationError("empty ensemble file")
        try:
            k, d, n, seed = lines[0].split()
            k, d, n = int(k), int(d), int(n)
        except ValueError:
            raise ValidationError(f"bad ensemble header {lines[0]!r}") from None
        body = lines[1:1 + d]
        body += [""] * (d - len(body))
        strings = tuple(np.array(as_symbols(s)) for s in body)
        return cls(strings, Params(k, d, n), None if seed == "explicit" else Seed.parse(seed))


def sample_ensemble(params: Params, seed: Seed) -> StringEnsemble:
    """Draw ``d`` independent uniform strings of length ``n`` over ``[0, k)``.

    String ``j`` comes from the stream ``seed.child(j)``.  ``Generator.integers``
    uses rejection sampling, so every symbol is exactly uniform.
    """
    strings = tuple(
        seed.child(j).generator().integers(0, params.k, size=params.n, dtype=SYMBOL_DTYPE)
        for j in range(params.d)
    )
    return StringEnsemble(strings, params, seed)


def is_subsequence(w: SymbolsLike, x: SymbolsLike) -> bool:
    """True iff ``w`` is obtained from ``x`` by deleting zero or more symbols."""
    w, x = as_symbols(w).tolist(), as_symbols(x).tolist()
    if len(w) > len(x):
        return False
    it = iter(x)
    return all(c in it for c in w)


def binary_filter(x: SymbolsLike, a: int, b: int) -> np.ndarray:
    """Keep only occurrences of ``a`` and ``b`` in ``x``, relabelled ``a -> 0``, ``b -> 1``."""
    if a == b:
        raise ValidationError("binary_filter needs two distinct symbols")
    arr = as_symbols(x)
    kept = arr[(arr == a) | (arr == b)]
    return (kept == b).astype(SYMBOL_DTYPE)


def filter_positions(x: SymbolsLike, a: int, b: int) -> np.ndarray:
    """Original indices of the symbols kept by :func:`binary_filter`."""
    arr = as_symbols(x)
    return np.flatnonzero((arr == a) | (arr == b))
