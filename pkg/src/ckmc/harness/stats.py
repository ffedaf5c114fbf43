"""Streaming summary statistics with an order-independent merge."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class Accumulator:
    """Welford accumulator for one scalar, with a pairwise merge."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    min: float = math.inf
    max: float = -math.inf

    def add(self, x: float) -> None:
        x = float(x)
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self.m2 += d * (x - self.mean)
        self.min = min(self.min, x)
        self.max = max(self.max, x)

    def merge(self, other: "Accumulator") -> "Accumulator":
        n = self.count + other.count
        if n == 0:
            return Accumulator()
        if self.count == 0:
            return Accumulator(other.count, other.mean, other.m2, other.min, other.max)
        if other.count == 0:
            return Accumulator(self.count, self.mean, self.m2, self.min, self.max)
        d = other.mean - self.mean
        # weighted form is symmetric in the two operands
        mean = (self.count * self.mean + other.count * other.mean) / n
        m2 = self.m2 + other.m2 + d * d * self.count * other.count / n
        return Accumulator(n, mean, m2, min(self.min, other.min), max(self.max, other.max))

    @property
    def variance(self) -> float:
        return max(self.m2 / (self.count - 1), 0.0) if self.count > 1 else math.nan

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else math.nan

    @property
    def ci95(self) -> tuple[float, float]:
        h = 1.96 * self.stderr
        return self.mean - h, self.mean + h


@dataclass
class SummaryStats:
    """Per-observable accumulators plus the windows and extinction times of the runs."""

    stats: dict[str, Accumulator] = field(default_factory=dict)
    windows: dict[str, tuple[float, float]] = field(default_factory=dict)
    extinction_times: list[float] = field(default_factory=list)
    failures: dict[int, str] = field(default_factory=dict)

    def add(self, name: str, value: float, window: tuple[float, float] | None = None) -> None:
        if math.isnan(value):
            return
        self.stats.setdefault(name, Accumulator()).add(value)
        if window is not None:
            old = self.windows.get(name)
            self.windows[name] = window if old is None else (max(old[0], window[0]),
                                                              min(old[1], window[1]))

    def merge(self, other: "SummaryStats") -> "SummaryStats":
        out = SummaryStats()
        for name in sorted(set(self.stats) | set(other.stats)):
            out.stats[name] = self.stats.get(name, Accumulator()).merge(
                other.stats.get(name, Accumulator()))
        for name in sorted(set(self.windows) | set(other.windows)):
            a = self.windows.get(name)
            b = other.windows.get(name)
            out.windows[name] = a if b is None else b if a is None else (
                max(a[0], b[0]), min(a[1], b[1]))
        out.extinction_times = sorted(self.extinction_times + other.extinction_times)
        out.failures = {**self.failures, **other.failures}
        return out

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def rows(self) -> list[tuple[str, float, float, float, float, int]]:
        out = []
        for name in sorted(self.stats):
            acc = self.stats[name]
            t0, t1 = self.windows.get(name, (math.nan, math.nan))
            out.append((name, t0, t1, acc.mean, acc.stderr, acc.count))
        return out
