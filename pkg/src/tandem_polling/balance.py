"""Global balance equations of a subsystem, written out state by state.

This is a second, independent transcription of the subsystem dynamics: it
sums probability flux *into* each state from its predecessors and compares
with the flux *out*, instead of pushing arcs forward as the generator
builder does.  Subsystem 2 is checked through the product-label swap, so
only the equations of subsystem 1 are written out.

Boundary handling: an arrival at a full queue has no out-rate, and a
station-1 completion that finds the station-2 buffer full still leaves its
origin state (the unit is lost, the tracked queue stays at its cap), so
such a state receives inflow from both ``(l11 + 1, ., U1, cap - 1)`` and
``(l11 + 1, ., U1, cap)``.
"""
from __future__ import annotations

import numpy as np

from .exceptions import InvalidParams
from .model import NetworkParams, Phase, Strategy, SubsystemSpace, check_product

S1, S2, U1, U2 = Phase.S1, Phase.S2, Phase.U1, Phase.U2


def _as_array(dist):
    return np.asarray(getattr(dist, "probabilities", dist), dtype=float)


def _swap_to_subsystem1(params: NetworkParams, pi):
    """Re-index a subsystem-2 vector onto subsystem 1 of the swapped network."""
    space2 = SubsystemSpace(params, 2)
    swapped = params.swapped()
    space1 = SubsystemSpace(swapped, 1)
    phase_swap = np.array([S2, S1, U2, U1])
    target = space1.index(space2.l21, space2.l11, phase_swap[space2.phase], space2.li2)
    out = np.empty(space1.size)
    out[target] = pi
    return swapped, out


def balance_residuals(params: NetworkParams, strategy, product: int, dist) -> np.ndarray:
    """Per-state ``outflow - inflow`` of the balance equations.

    The returned vector is indexed like the subsystem-1 state space of the
    (possibly label-swapped) network.
    """
    strategy = Strategy.parse(strategy)
    check_product(product)
    pi = _as_array(dist)
    expected = SubsystemSpace(params, product).size
    if pi.shape != (expected,):
        raise InvalidParams("dist", f"expected {expected} probabilities, got {pi.shape}")
    if product == 2:
        params, pi = _swap_to_subsystem1(params, pi)
    space = SubsystemSpace(params, 1)
    n1, n2 = params.n1, params.n2
    lam1, lam2 = params.lambda1, params.lambda2
    mu11, mu21, mu12 = params.mu11, params.mu21, params.mu12
    mus1, mus2 = params.mus1, params.mus2
    sp_mode = strategy is Strategy.SP

    def p(a, b, ph, c):
        if not (0 <= a <= n1 and 0 <= b <= n2 and 0 <= c <= n1):
            return 0.0
        k = space.index(a, b, ph, c)
        return 0.0 if k < 0 else pi[k]

    res = np.empty(space.size)
    for k in range(space.size):
        a, b, ph, c = (int(space.l11[k]), int(space.l21[k]), int(space.phase[k]), int(space.li2[k]))
        out = lam1 * (a < n1) + lam2 * (b < n2)
        inflow = 0.0
        if a > 0:
            inflow += lam1 * p(a - 1, b, ph, c)
        if b > 0:
            inflow += lam2 * p(a, b - 1, ph, c)

        if ph == S1:
            out += mus1
            if b == 0:
                inflow += mus2 * p(a, 0, S2, c) + mu21 * p(a, 1, U2, c)
        elif ph == S2:
            out += mus2
            if a == 0:
                inflow += mus1 * p(0, b, S1, c)
                if c > 0:
                    inflow += mu11 * p(1, b, U1, c - 1)
                if c == n1:
                    inflow += mu11 * p(1, b, U1, n1)
        elif ph == U1:
            out += mu11
            if sp_mode and c > 0:
                out += mu12
            inflow += mus1 * p(a, b, S1, c)
            if c > 0:
                inflow += mu11 * p(a + 1, b, U1, c - 1)
            if c == n1:
                inflow += mu11 * p(a + 1, b, U1, n1)
            if sp_mode:
                inflow += mu12 * p(a, b, U1, c + 1)
        else:  # U2
            out += mu21
            if not sp_mode and c > 0:
                out += mu12
            inflow += mus2 * p(a, b, S2, c)
            inflow += mu21 * p(a, b + 1, U2, c)
            if not sp_mode:
                inflow += mu12 * p(a, b, U2, c + 1)
        res[k] = out * pi[k] - inflow
    return res


def residual_against_balance_equations(params: NetworkParams, strategy, product: int, dist) -> float:
    """Largest absolute violation of the balance equations."""
    return float(np.max(np.abs(balance_residuals(params, strategy, product, dist))))
