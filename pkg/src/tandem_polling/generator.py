"""Sparse infinitesimal generators for the subsystem and full chains."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np
import scipy.sparse as sp

from .model import (
    FullSpace,
    NetworkParams,
    Phase,
    Strategy,
    SubsystemSpace,
    check_product,
)


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A CTMC generator over an indexed state space.

    ``matrix`` is a CSR matrix holding the off-diagonal rates and, on the
    diagonal, minus the row sums.
    """

    matrix: sp.csr_matrix
    space: SubsystemSpace | FullSpace
    strategy: Strategy | None = None
    product: int | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def off_diagonal(self) -> sp.csr_matrix:
        off = self.matrix - sp.diags(self.matrix.diagonal())
        off.eliminate_zeros()
        return off.tocsr()

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Off-diagonal arcs ``(from, to, rate)`` in row-major order."""
        off = self.off_diagonal().tocoo()
        order = np.lexsort((off.col, off.row))
        for k in order:
            yield int(off.row[k]), int(off.col[k]), float(off.data[k])

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def write_edge_list(self, fh: TextIO) -> int:
        """Write one ``from<TAB>to<TAB>rate`` line per arc; returns the arc count."""
        n = 0
        for i, j, rate in self.edges():
            fh.write(f"{i}\t{j}\t{rate:.17g}\n")
            n += 1
        return n


def _assemble(size, src, dst, rates) -> sp.csr_matrix:
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    rates = np.concatenate(rates)
    if np.any(src == dst):
        raise AssertionError("self-loop generated")
    if np.any(dst < 0):
        raise AssertionError("transition left the state space")
    off = sp.coo_matrix((rates, (src, dst)), shape=(size, size)).tocsr()
    off.sum_duplicates()
    out = np.asarray(off.sum(axis=1)).ravel()
    return (off - sp.diags(out)).tocsr()


def _station1_moves(params: NetworkParams, a, b, ph, station2: dict):
    """Yield ``(mask, new_a, new_b, new_phase, new_station2, rate)`` for every
    event type driven by arrivals and by the station-1 server.

    ``station2`` maps each tracked product to its station-2 queue array.
    Completions of a tracked product join its station-2 queue unless that
    queue is full, in which case the unit is lost.
    """
    n1, n2 = params.n1, params.n2
    yield a < n1, a + 1, b, ph, station2, params.lambda1
    yield b < n2, a, b + 1, ph, station2, params.lambda2

    s1 = ph == Phase.S1
    yield s1, a, b, np.where(a > 0, Phase.U1, Phase.S2), station2, params.mus1
    s2 = ph == Phase.S2
    yield s2, a, b, np.where(b > 0, Phase.U2, Phase.S1), station2, params.mus2

    for k, queue, phase_k, next_setup in (
        (1, a, Phase.U1, Phase.S2),
        (2, b, Phase.U2, Phase.S1),
    ):
        mask = ph == phase_k
        new_queue = queue - 1
        new_phase = np.where(new_queue == 0, next_setup, phase_k)
        moved = dict(station2)
        if k in station2:
            q = station2[k]
            moved[k] = np.where(q < params.cap(k), q + 1, q)
        na, nb = (new_queue, b) if k == 1 else (a, new_queue)
        yield mask, na, nb, new_phase, moved, params.mu(k, 1)


def _station2_moves(params: NetworkParams, strategy: Strategy, ph, station2: dict):
    for k, q in station2.items():
        mask = (ph == strategy.station2_phase(k)) & (q >= 1)
        moved = dict(station2)
        moved[k] = q - 1
        yield mask, moved, params.mu(k, 2)


def build_subsystem_generator(
    params: NetworkParams, strategy: Strategy | str, product: int
) -> GeneratorMatrix:
    """Generator of subsystem ``product`` under ``strategy``."""
    strategy = Strategy.parse(strategy)
    check_product(product)
    space = SubsystemSpace(params, product)
    a, b, ph, c = space.l11, space.l21, space.phase, space.li2
    idx = np.arange(space.size)
    src, dst, rates = [], [], []

    def emit(mask, na, nb, nph, nc, rate):
        if rate == 0 or not mask.any():
            return
        src.append(idx[mask])
        dst.append(space.index(na[mask], nb[mask], np.asarray(nph)[mask], nc[mask]))
        rates.append(np.full(int(mask.sum()), rate))

    tracked = {product: c}
    for mask, na, nb, nph, moved, rate in _station1_moves(params, a, b, ph, tracked):
        emit(mask, na, nb, nph, moved[product], rate)
    for mask, moved, rate in _station2_moves(params, strategy, ph, tracked):
        emit(mask, a, b, ph, moved[product], rate)

    matrix = _assemble(space.size, src, dst, rates)
    return GeneratorMatrix(matrix, space, strategy, product)


def build_full_generator(
    params: NetworkParams, strategy: Strategy | str, cap: int | None = None
) -> GeneratorMatrix:
    """Generator of the undecomposed chain (both station-2 queues tracked).

    Raises :class:`DimensionTooLarge` when the state count exceeds ``cap``
    (default: :func:`tandem_polling.model.max_states`).
    """
    strategy = Strategy.parse(strategy)
    space = FullSpace(params, cap=cap)
    a, b, ph = space.l11, space.l21, space.phase
    idx = np.arange(space.size)
    src, dst, rates = [], [], []

    def emit(mask, na, nb, nph, moved, rate):
        if rate == 0 or not mask.any():
            return
        src.append(idx[mask])
        dst.append(
            space.index(na[mask], nb[mask], np.asarray(nph)[mask], moved[1][mask], moved[2][mask])
        )
        rates.append(np.full(int(mask.sum()), rate))

    tracked = {1: space.l12, 2: space.l22}
    for mask, na, nb, nph, moved, rate in _station1_moves(params, a, b, ph, tracked):
        emit(mask, na, nb, nph, moved, rate)
    for mask, moved, rate in _station2_moves(params, strategy, ph, tracked):
        emit(mask, a, b, ph, moved, rate)

    matrix = _assemble(space.size, src, dst, rates)
    return GeneratorMatrix(matrix, space, strategy, None)
