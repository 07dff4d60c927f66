"""Derived schedule and loop counts for one accuracy/advice setting."""

from __future__ import annotations

import math
from functools import cached_property
from dataclasses import asdict, dataclass, field

from .errors import InvalidInputError


@dataclass(frozen=True)
class Tunables:
    """Multipliers on the polylogarithmic loop counts.

    ``lam`` scales every sampled loop count at once; ``lam = 1`` is the
    faithful setting. Binary search rounds are never scaled because a failed
    search discards an edge rather than adding noise.
    """

    c_bs: float = 4.0
    c_chd: float = 16.0
    c_cld: float = 16.0
    c_chl: float = 16.0
    c_hde: float = 1.0
    c_li: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise InvalidInputError(f"tunable {name} must be positive")
        if self.lam > 1:
            raise InvalidInputError("lam must lie in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def _smallest_power_at_least(alpha: float, target: float) -> int:
    """Smallest integer j >= 0 with alpha**j >= target."""
    if target <= 1:
        return 0
    j = max(0, math.ceil(math.log(target) / math.log(alpha)) - 1)
    while alpha**j < target:
        j += 1
    while j > 0 and alpha ** (j - 1) >= target:
        j -= 1
    return j


def tau_target(n: int, eps: float) -> float:
    """Quantity that alpha**tau must reach; the only place it is defined."""
    return math.log2(n) / eps


@dataclass(frozen=True)
class Params:
    eps: float
    n: int
    m_bar: float
    tunables: Tunables = field(default_factory=Tunables)

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise InvalidInputError("eps must lie in (0, 1)")
        if self.n < 2:
            raise InvalidInputError("need n >= 2")
        if self.m_bar < 1:
            raise InvalidInputError("advice must be at least 1")

    @property
    def alpha(self) -> float:
        return 1.0 + self.eps

    @property
    def log_n(self) -> float:
        return math.log2(self.n)

    @cached_property
    def s(self) -> int:
        """Integer with alpha**(s-1) <= sqrt(m_bar) < alpha**s."""
        root = math.sqrt(self.m_bar)
        s = max(1, math.floor(math.log(root) / math.log(self.alpha)) + 1)
        while self.alpha ** (s - 1) > root:
            s -= 1
        while self.alpha**s <= root:
            s += 1
        return s

    @cached_property
    def beta(self) -> int:
        return _smallest_power_at_least(self.alpha, self.n)

    @cached_property
    def tau(self) -> int:
        return _smallest_power_at_least(self.alpha, tau_target(self.n, self.eps))

    def power(self, j: float) -> float:
        return self.alpha**j

    def scaled(self, x: float) -> int:
        return max(1, math.ceil(x * self.tunables.lam))

    # high/low classification and the two neighbour-counting checks
    def t_chd(self) -> int:
        return self.scaled(self.tunables.c_chd * self.log_n**2 / self.eps**3)

    def t_cld(self, d: float) -> int:
        a_s = self.power(self.s)
        return self.scaled(a_s / d * self.tunables.c_cld * self.log_n**2 / self.eps**3)

    def t_chl(self) -> int:
        return self.scaled(self.tunables.c_chl * self.log_n**4 / self.eps**4)

    # sizes of the low buckets
    def li_trivial(self, i: int) -> bool:
        return self.eps**2 * self.m_bar / (self.power(i) * self.log_n**2) >= self.n

    def li_samples(self, i: int) -> int:
        raw = self.n * self.power(i) * self.log_n**5 / (self.eps**5 * self.m_bar)
        return self.scaled(math.ceil(raw) * self.tunables.c_li)

    def li_shift(self, i: int) -> float:
        return self.eps**2 * self.m_bar / (2 * self.power(i) * self.n * self.log_n**2)

    # sizes of the high buckets
    def hde_rounds(self) -> int:
        raw = self.n * self.log_n**7 / (self.eps**9 * math.sqrt(self.m_bar))
        return self.scaled(raw * self.tunables.c_hde)

    def hde_p(self, eta: float) -> float:
        return self.eps**5 * math.sqrt(self.m_bar) / (eta * self.n**2 * self.log_n**4)

    def hde_q(self, k: int) -> float:
        return self.eps / (self.power(k + 1) * self.log_n)

    def hde_threshold(self, eta: float) -> float:
        few_mean = self.hde_rounds() * eta * self.n * self.hde_p(eta) * self.eps / self.log_n
        return (1 + self.eps / 4) * few_mean

    def hde_delta(self) -> float:
        return self.eps**7 / self.n**2

    def eta_min(self, k: int) -> float:
        return self.eps**4 * self.m_bar / (self.power(k) * self.n * self.log_n**3)

    def eta_steps(self, k: int) -> int:
        """Number of scan values 1, 1/alpha, ... that are >= eta_min(k)."""
        lo = self.eta_min(k)
        if lo > 1:
            return 0
        j = max(0, math.floor(math.log(1 / lo) / math.log(self.alpha)) - 1)
        while self.alpha ** -(j + 1) >= lo:
            j += 1
        while j > 0 and self.alpha**-j < lo:
            j -= 1
        return j + 1

    def summary(self) -> dict:
        return {
            "eps": self.eps,
            "n": self.n,
            "m_bar": self.m_bar,
            "alpha": self.alpha,
            "s": self.s,
            "beta": self.beta,
            "tau": self.tau,
            "tunables": self.tunables.to_dict(),
        }
