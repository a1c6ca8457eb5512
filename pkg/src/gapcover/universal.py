"""(n, k)-universal sets: construction and exact verification.

A family of length-n binary strings is (n, k)-universal when its restriction
to any k positions shows all 2^k patterns. Strings are stored as ints with
position 1 in the least significant bit.

Construction is a derandomized greedy cover of the (k-subset, pattern)
constraints: each string is fixed bit by bit so as to maximize the expected
number of newly satisfied constraints if the remaining bits were uniform.
Every string therefore satisfies at least a 2^-k fraction of what is left,
which gives size <= ceil(2^k * k * ln n) + 2^k.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GapCoverError, ParseError, check_budget


@dataclass(frozen=True)
class UniversalSet:
    n: int
    k: int
    strings: tuple[int, ...]

    def bitstrings(self) -> list[str]:
        """Strings as text, position 1 first."""
        return [format(s, f"0{self.n}b")[::-1] if self.n else "" for s in self.strings]

    def bit_matrix(self) -> np.ndarray:
        """``count x n`` uint8 matrix; column c is position c + 1."""
        out = np.zeros((len(self.strings), self.n), dtype=np.uint8)
        for r, s in enumerate(self.strings):
            for c in range(self.n):
                out[r, c] = s >> c & 1
        return out


@dataclass(frozen=True)
class UniversalCheck:
    ok: bool
    positions: tuple[int, ...] | None = None  # 1-based
    missing: str | None = None  # pattern, first position first

    def __bool__(self) -> bool:
        return self.ok


def explicit_regime(n: int, k: int) -> bool:
    """Whether ``k * 2^k <= sqrt(n)``, where a size-n universal set is promised."""
    return k * 2**k <= math.sqrt(n)


def fallback_size_bound(n: int, k: int) -> int:
    if n <= 1 or k == 0:
        return 2**k
    return math.ceil(2**k * k * math.log(n)) + 2**k


def verify_universal(us: UniversalSet, budget: int | None = None) -> UniversalCheck:
    n, k = us.n, us.k
    if k > n:
        raise GapCoverError(f"k = {k} exceeds n = {n}")
    if any(s >> n for s in us.strings):
        raise GapCoverError(f"string longer than n = {n} bits")
    check_budget("verify_universal", math.comb(n, k) * 2**k, budget)
    if k == 0:
        # the empty pattern needs one string to witness it
        return UniversalCheck(True) if us.strings else UniversalCheck(False, (), "")
    bits = us.bit_matrix().astype(np.int64)
    weights = 1 << np.arange(k, dtype=np.int64)
    for chunk in _combination_chunks(n, k):
        codes = (bits[:, chunk] * weights).sum(axis=2)  # (count, Q)
        present = np.zeros((chunk.shape[0], 2**k), dtype=bool)
        present[np.arange(chunk.shape[0])[None, :], codes] = True
        bad = np.flatnonzero(~present.all(axis=1))
        if bad.size:
            q = int(bad[0])
            missing = sorted(
                format(int(p), f"0{k}b")[::-1] for p in np.flatnonzero(~present[q])
            )[0]
            return UniversalCheck(False, tuple(int(c) + 1 for c in chunk[q]), missing)
    return UniversalCheck(True)


def build_universal(n: int, k: int, seed: int = 0, budget: int | None = None) -> UniversalSet:
    if k < 0 or n < 0:
        raise GapCoverError("n and k must be non-negative")
    if k > n:
        raise GapCoverError(f"k = {k} exceeds n = {n}")
    if k == 0:
        return UniversalSet(n, 0, (0,))
    check_budget("build_universal", math.comb(n, k) * 2**k, budget)
    rng = random.Random(seed)
    combos = np.array(list(combinations(range(n), k)), dtype=np.int64)
    patterns = np.arange(2**k, dtype=np.int64)
    # every (subset, pattern) pair; pattern bit j belongs to combos[:, j]
    cols = np.repeat(combos, 2**k, axis=0)
    pats = np.tile(patterns, len(combos))
    pat_bits = (pats[:, None] >> np.arange(k)) & 1
    strings: list[int] = []
    while len(cols):
        s = _best_string(n, cols, pat_bits, rng)
        strings.append(s)
        sbits = np.array([s >> c & 1 for c in range(n)], dtype=np.int64)
        hit = (sbits[cols] == pat_bits).all(axis=1)
        cols, pat_bits = cols[~hit], pat_bits[~hit]
    us = UniversalSet(n, k, tuple(strings))
    limit = n if explicit_regime(n, k) else fallback_size_bound(n, k)
    if len(strings) > limit:
        raise GapCoverError(f"internal: universal set of size {len(strings)} exceeds bound {limit}")
    if not verify_universal(us, budget):
        raise GapCoverError("internal: constructed set failed verification")
    return us


def _best_string(n: int, cols: np.ndarray, pat_bits: np.ndarray, rng: random.Random) -> int:
    q, k = cols.shape
    weight = np.full(q, 0.5**k)
    flat = cols.ravel()
    order = np.argsort(flat, kind="stable")
    bounds = np.searchsorted(flat[order], np.arange(n + 1))
    s = 0
    for p in range(n):
        idx = order[bounds[p] : bounds[p + 1]]
        rows, slots = idx // k, idx % k
        want = pat_bits[rows, slots]
        w = weight[rows]
        gain1 = w[want == 1].sum()
        gain0 = w[want == 0].sum()
        if gain1 > gain0:
            bit = 1
        elif gain0 > gain1:
            bit = 0
        else:
            bit = rng.randrange(2)
        if bit:
            s |= 1 << p
        weight[rows] = np.where(want == bit, w * 2, 0.0)
    return s


def _combination_chunks(n: int, k: int, size: int = 1 << 15):
    buf = []
    for c in combinations(range(n), k):
        buf.append(c)
        if len(buf) == size:
            yield np.array(buf, dtype=np.int64)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


@dataclass(frozen=True)
class SizeReport:
    n: int
    k: int
    regime: str  # "explicit" or "fallback"
    size: int
    bound: int

    def __str__(self) -> str:
        return f"n={self.n} k={self.k} regime={self.regime} size={self.size} bound={self.bound}"


def size_bound_report(n: int, k: int, seed: int = 0, budget: int | None = None) -> SizeReport:
    us = build_universal(n, k, seed=seed, budget=budget)
    if explicit_regime(n, k):
        return SizeReport(n, k, "explicit", len(us.strings), n)
    return SizeReport(n, k, "fallback", len(us.strings), fallback_size_bound(n, k))


def dump_universal(us: UniversalSet) -> str:
    lines = [f"{us.n} {us.k} {len(us.strings)}"] + us.bitstrings()
    return "\n".join(lines) + "\n"


def load_universal(text: str) -> UniversalSet:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty universal-set file", 1)
    try:
        n, k, count = (int(x) for x in lines[0].split())
    except ValueError:
        raise ParseError("header must be 'n k count'", 1) from None
    body = lines[1:]
    if len(body) < count:
        raise ParseError(f"expected {count} strings, found {len(body)}", len(lines))
    strings = []
    for i, line in enumerate(body[:count], start=2):
        line = line.strip()
        if len(line) != n or set(line) - {"0", "1"}:
            raise ParseError(f"expected a {n}-bit string, got {line!r}", i)
        strings.append(int(line[::-1], 2) if n else 0)
    if len(set(strings)) != len(strings):
        raise ParseError("duplicate strings")
    return UniversalSet(n, k, tuple(strings))
