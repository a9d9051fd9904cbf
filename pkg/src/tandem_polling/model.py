"""Network parameters, coordination strategies and CTMC state spaces.

A subsystem chain tracks both station-1 queues, the station-1 server phase
and the station-2 queue of one product.  The full chain tracks both
station-2 queues.  Station 2 has no phase of its own: under either strategy
its activity is a function of the station-1 phase.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, fields, replace
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionTooLarge, InvalidParams

DEFAULT_MAX_STATES = 2_000_000


def max_states() -> int:
    """State-count cap, overridable through ``POLLING_MAX_STATES``."""
    raw = os.environ.get("POLLING_MAX_STATES")
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_STATES
    try:
        value = int(float(raw))
    except ValueError:
        raise InvalidParams("POLLING_MAX_STATES", f"not a number: {raw!r}") from None
    if value < 1:
        raise InvalidParams("POLLING_MAX_STATES", "must be positive")
    return value


class Phase(enum.IntEnum):
    """Station-1 server activity; the integer value fixes the state order."""

    S1 = 0
    S2 = 1
    U1 = 2
    U2 = 3

    @property
    def product(self) -> int:
        return 1 if self in (Phase.S1, Phase.U1) else 2

    @property
    def is_setup(self) -> bool:
        return self in (Phase.S1, Phase.S2)

    def swapped(self) -> "Phase":
        return _SWAP_PHASE[self]

    @staticmethod
    def setup(product: int) -> "Phase":
        return Phase.S1 if product == 1 else Phase.S2

    @staticmethod
    def service(product: int) -> "Phase":
        return Phase.U1 if product == 1 else Phase.U2


_SWAP_PHASE = {Phase.S1: Phase.S2, Phase.S2: Phase.S1, Phase.U1: Phase.U2, Phase.U2: Phase.U1}


class Strategy(enum.Enum):
    SP = "SP"
    OP = "OP"

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise InvalidParams("strategy", f"expected SP or OP, got {value!r}") from None

    def station2_phase(self, product: int) -> Phase:
        """Station-1 phase during which station 2 serves ``product``."""
        check_product(product)
        if self is Strategy.SP:
            return Phase.service(product)
        return Phase.service(other(product))


def check_product(product: int) -> int:
    if product not in (1, 2):
        raise InvalidParams("product", f"must be 1 or 2, got {product!r}")
    return product


def other(product: int) -> int:
    return 3 - product


@dataclass(frozen=True)
class NetworkParams:
    """Rates and buffer caps of the two-product, two-station network.

    ``muIJ`` is the service rate of product ``I`` at station ``J``; ``musI``
    is the setup rate for product ``I`` (shared by both stations).  ``n1``
    and ``n2`` cap the type-1 and type-2 queues at each station separately.

    Arrival rates may be zero (a degenerate but simulable network); every
    other rate must be strictly positive.
    """

    lambda1: float
    lambda2: float
    mu11: float
    mu21: float
    mu12: float
    mu22: float
    mus1: float
    mus2: float
    n1: int
    n2: int

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("n1", "n2"):
                if isinstance(value, bool) or not float(value).is_integer():
                    raise InvalidParams(f.name, f"must be an integer, got {value!r}")
                object.__setattr__(self, f.name, int(value))
                if value < 1:
                    raise InvalidParams(f.name, f"must be >= 1, got {value!r}")
                continue
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParams(f.name, f"not a number: {value!r}") from None
            if not math.isfinite(value):
                raise InvalidParams(f.name, f"must be finite, got {value!r}")
            if f.name.startswith("lambda"):
                if value < 0:
                    raise InvalidParams(f.name, f"must be >= 0, got {value!r}")
            elif value <= 0:
                raise InvalidParams(f.name, f"must be > 0, got {value!r}")
            object.__setattr__(self, f.name, value)

    @classmethod
    def symmetric(cls, lam, mu1, mu2, mus, n) -> "NetworkParams":
        """Both products share every rate and cap."""
        return cls(lam, lam, mu1, mu1, mu2, mu2, mus, mus, n, n)

    def lam(self, product: int) -> float:
        return self.lambda1 if check_product(product) == 1 else self.lambda2

    def mu(self, product: int, station: int) -> float:
        check_product(product)
        if station not in (1, 2):
            raise InvalidParams("station", f"must be 1 or 2, got {station!r}")
        return getattr(self, f"mu{product}{station}")

    def mus(self, product: int) -> float:
        return self.mus1 if check_product(product) == 1 else self.mus2

    def cap(self, product: int) -> int:
        return self.n1 if check_product(product) == 1 else self.n2

    def rho(self, station: int) -> float:
        """Infinite-buffer traffic intensity at ``station`` (advisory only)."""
        return self.lambda1 / self.mu(1, station) + self.lambda2 / self.mu(2, station)

    def with_buffers(self, n1: int, n2: int | None = None) -> "NetworkParams":
        return replace(self, n1=n1, n2=n1 if n2 is None else n2)

    def swapped(self) -> "NetworkParams":
        """The same network with product labels 1 and 2 exchanged."""
        return NetworkParams(
            self.lambda2, self.lambda1,
            self.mu21, self.mu11, self.mu22, self.mu12,
            self.mus2, self.mus1,
            self.n2, self.n1,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class SubsystemState(NamedTuple):
    l11: int
    l21: int
    phase: Phase
    li2: int


class FullState(NamedTuple):
    l11: int
    l21: int
    phase: Phase
    l12: int
    l22: int


def count_subsystem_states(params: NetworkParams, product: int) -> int:
    n1, n2 = params.n1, params.n2
    per_queue_pair = 2 * (n1 + 1) * (n2 + 1) + n1 * (n2 + 1) + (n1 + 1) * n2
    return per_queue_pair * (params.cap(check_product(product)) + 1)


def count_full_states(params: NetworkParams) -> int:
    return count_subsystem_states(params, 1) * (params.n2 + 1)


def _station1_grid(n1, n2):
    a, b, ph = np.meshgrid(np.arange(n1 + 1), np.arange(n2 + 1), np.arange(4), indexing="ij")
    return a.ravel(), b.ravel(), ph.ravel()


def _feasible(a, b, ph):
    return ~(((ph == Phase.U1) & (a == 0)) | ((ph == Phase.U2) & (b == 0)))


class SubsystemSpace:
    """Indexed state space of subsystem ``product``.

    States are ordered lexicographically on ``(l11, l21, phase, li2)`` with
    ``S1 < S2 < U1 < U2``; the position in that order is the matrix index.
    """

    def __init__(self, params: NetworkParams, product: int):
        self.params = params
        self.product = check_product(product)
        self.cap = params.cap(product)
        n1, n2, ni = params.n1, params.n2, self.cap
        grid = np.meshgrid(
            np.arange(n1 + 1), np.arange(n2 + 1), np.arange(4), np.arange(ni + 1), indexing="ij"
        )
        a, b, ph, c = (g.ravel() for g in grid)
        keep = _feasible(a, b, ph)
        self.l11 = a[keep]
        self.l21 = b[keep]
        self.phase = ph[keep]
        self.li2 = c[keep]
        self.size = int(keep.sum())
        lookup = np.full(keep.shape, -1, dtype=np.int64)
        lookup[keep] = np.arange(self.size)
        self._lookup = lookup.reshape(n1 + 1, n2 + 1, 4, ni + 1)

    def __len__(self):
        return self.size

    @property
    def queue1(self):
        """Station-1 queue length of the tracked product."""
        return self.l11 if self.product == 1 else self.l21

    def index(self, l11, l21, phase, li2):
        """Vectorised lookup; returns -1 for infeasible or out-of-range tuples."""
        return self._lookup[l11, l21, phase, li2]

    def index_of(self, state) -> int:
        l11, l21, phase, li2 = state
        n1, n2 = self.params.n1, self.params.n2
        if not (0 <= l11 <= n1 and 0 <= l21 <= n2 and 0 <= li2 <= self.cap):
            raise KeyError(state)
        k = int(self._lookup[l11, l21, int(phase), li2])
        if k < 0:
            raise KeyError(state)
        return k

    def state_at(self, k: int) -> SubsystemState:
        return SubsystemState(
            int(self.l11[k]), int(self.l21[k]), Phase(int(self.phase[k])), int(self.li2[k])
        )

    @cached_property
    def states(self) -> list[SubsystemState]:
        return [self.state_at(k) for k in range(self.size)]


class FullSpace:
    """Indexed state space of the undecomposed chain, ordered on
    ``(l11, l21, phase, l12, l22)``."""

    def __init__(self, params: NetworkParams, cap: int | None = None):
        self.params = params
        total = count_full_states(params)
        limit = max_states() if cap is None else cap
        if total > limit:
            raise DimensionTooLarge(f"full chain has {total} states, cap is {limit}")
        n1, n2 = params.n1, params.n2
        grid = np.meshgrid(
            np.arange(n1 + 1), np.arange(n2 + 1), np.arange(4),
            np.arange(n1 + 1), np.arange(n2 + 1), indexing="ij",
        )
        a, b, ph, c1, c2 = (g.ravel() for g in grid)
        keep = _feasible(a, b, ph)
        self.l11 = a[keep]
        self.l21 = b[keep]
        self.phase = ph[keep]
        self.l12 = c1[keep]
        self.l22 = c2[keep]
        self.size = int(keep.sum())
        lookup = np.full(keep.shape, -1, dtype=np.int64)
        lookup[keep] = np.arange(self.size)
        self._lookup = lookup.reshape(n1 + 1, n2 + 1, 4, n1 + 1, n2 + 1)

    def __len__(self):
        return self.size

    def index(self, l11, l21, phase, l12, l22):
        return self._lookup[l11, l21, phase, l12, l22]

    def index_of(self, state) -> int:
        l11, l21, phase, l12, l22 = state
        n1, n2 = self.params.n1, self.params.n2
        if not (0 <= l11 <= n1 and 0 <= l21 <= n2 and 0 <= l12 <= n1 and 0 <= l22 <= n2):
            raise KeyError(state)
        k = int(self._lookup[l11, l21, int(phase), l12, l22])
        if k < 0:
            raise KeyError(state)
        return k

    def state_at(self, k: int) -> FullState:
        return FullState(
            int(self.l11[k]), int(self.l21[k]), Phase(int(self.phase[k])),
            int(self.l12[k]), int(self.l22[k]),
        )

    @cached_property
    def states(self) -> list[FullState]:
        return [self.state_at(k) for k in range(self.size)]


def enumerate_subsystem_states(params: NetworkParams, product: int) -> list[SubsystemState]:
    return SubsystemSpace(params, product).states


def enumerate_full_states(params: NetworkParams) -> list[FullState]:
    return FullSpace(params).states
