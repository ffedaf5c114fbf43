"""Cumulative-rate samplers over a mutable move table."""

from __future__ import annotations

from typing import Generic, Hashable, TypeVar

import numpy as np

K = TypeVar("K", bound=Hashable)


class FenwickSampler(Generic[K]):
    """Binary indexed tree keyed by move, with slot reuse through a free list."""

    def __init__(self, capacity: int = 16):
        self._cap = max(1, capacity)
        self._tree = np.zeros(self._cap + 1)
        self._w = np.zeros(self._cap)
        self._slot: dict[K, int] = {}
        self._key: list[K | None] = [None] * self._cap
        self._free: list[int] = list(range(self._cap - 1, -1, -1))

    def __len__(self) -> int:
        return len(self._slot)

    def __contains__(self, key: K) -> bool:
        return key in self._slot

    def _add(self, i: int, delta: float) -> None:
        i += 1
        n = self._cap
        t = self._tree
        while i <= n:
            t[i] += delta
            i += i & (-i)

    def _grow(self) -> None:
        old_w, old_keys = self._w, self._key
        self._cap *= 2
        self._w = np.zeros(self._cap)
        self._w[: len(old_w)] = old_w
        self._key = old_keys + [None] * (self._cap - len(old_keys))
        self._free = list(range(self._cap - 1, len(old_w) - 1, -1)) + self._free
        self._rebuild()

    def _rebuild(self) -> None:
        t = np.zeros(self._cap + 1)
        t[1:] = self._w
        for i in range(1, self._cap + 1):
            j = i + (i & (-i))
            if j <= self._cap:
                t[j] += t[i]
        self._tree = t

    def set(self, key: K, rate: float) -> None:
        if rate < 0:
            raise ValueError("rates must be nonnegative")
        i = self._slot.get(key)
        if i is None:
            if rate == 0.0:
                return
            if not self._free:
                self._grow()
            i = self._free.pop()
            self._slot[key] = i
            self._key[i] = key
        self._add(i, rate - self._w[i])
        self._w[i] = rate
        if rate == 0.0:
            del self._slot[key]
            self._key[i] = None
            self._free.append(i)

    def remove(self, key: K) -> None:
        self.set(key, 0.0)

    def rate(self, key: K) -> float:
        i = self._slot.get(key)
        return 0.0 if i is None else float(self._w[i])

    @property
    def total(self) -> float:
        return float(self._w.sum())

    def items(self):
        return [(k, float(self._w[i])) for k, i in self._slot.items()]

    def sample(self, u: float) -> K:
        """Key whose cumulative interval contains ``u * total`` (``u`` in [0, 1))."""
        target = u * self.total
        n = self._cap
        mask = 1 << (n.bit_length() - 1)
        pos = 0
        while mask:
            nxt = pos + mask
            if nxt <= n and self._tree[nxt] <= target:
                target -= self._tree[nxt]
                pos = nxt
            mask >>= 1
        if pos >= n or self._key[pos] is None:
            # rounding at the upper edge: take the last live slot
            pos = max(self._slot.values())
        return self._key[pos]


class LinearSampler(Generic[K]):
    """Reference sampler by linear scan, for cross-checking distributions."""

    def __init__(self):
        self._rates: dict[K, float] = {}

    def set(self, key: K, rate: float) -> None:
        if rate == 0.0:
            self._rates.pop(key, None)
        else:
            self._rates[key] = rate

    @property
    def total(self) -> float:
        return sum(self._rates.values())

    def sample(self, u: float) -> K:
        target = u * self.total
        run = 0.0
        last = None
        for k, r in self._rates.items():
            run += r
            last = k
            if run > target:
                return k
        return last
