"""Stationary distributions of finite CTMC generators."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from . import _gth
from .exceptions import DimensionTooLarge, ReducibleChain, SingularSystem
from .generator import GeneratorMatrix
from .model import max_states

log = logging.getLogger(__name__)

DIRECT = "direct-replaced-row"
GTH = "GTH"

CLAMP_LIMIT = 1e-14
# Largest band (entries) the GTH fallback will allocate: 2**28 doubles = 2 GiB.
GTH_MAX_BAND_ENTRIES = 2**28


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    probabilities: np.ndarray
    residual: float
    solver_used: str

    def __len__(self):
        return len(self.probabilities)

    def __getitem__(self, k):
        return self.probabilities[k]


@dataclass(frozen=True)
class SolverOptions:
    """``method`` is ``"direct"``, ``"gth"`` or ``"auto"`` (direct, then GTH
    if the direct answer fails the residual or sign checks)."""

    method: str = "auto"
    tol: float = 1e-10
    max_states: int | None = None
    refine_steps: int = 2


def _as_csr(Q) -> sp.csr_matrix:
    if isinstance(Q, GeneratorMatrix):
        return Q.matrix
    if sp.issparse(Q):
        return sp.csr_matrix(Q)
    return sp.csr_matrix(np.asarray(Q, dtype=float))


def _pattern(A: sp.csr_matrix) -> sp.csr_matrix:
    off = sp.csr_matrix(A - sp.diags(A.diagonal()))
    off.eliminate_zeros()
    off.data = np.ones_like(off.data)
    return off


def check_irreducible(Q) -> tuple[bool, int]:
    """Strongly connected components of the off-diagonal pattern.

    Returns ``(irreducible, n_classes)``.
    """
    A = _as_csr(Q)
    if A.shape[0] <= 1:
        return True, 1
    n, _ = connected_components(_pattern(A), directed=True, connection="strong")
    return n == 1, int(n)


def recurrent_states(Q) -> list[np.ndarray]:
    """Index sets of the closed communicating classes.

    States outside every returned set are transient.
    """
    A = _as_csr(Q)
    if A.shape[0] <= 1:
        return [np.arange(A.shape[0])]
    n, labels = connected_components(_pattern(A), directed=True, connection="strong")
    if n == 1:
        return [np.arange(A.shape[0])]
    off = _pattern(A).tocoo()
    leaves = labels[off.row] != labels[off.col]
    open_classes = set(np.unique(labels[off.row[leaves]]).tolist())
    return [np.flatnonzero(labels == c) for c in range(n) if c not in open_classes]


def recurrent_class_count(Q) -> int:
    """Number of closed communicating classes."""
    return len(recurrent_states(Q))


def stationarity_residual(Q, pi) -> float:
    A = _as_csr(Q)
    return float(np.max(np.abs(A.T @ np.asarray(pi)))) if A.shape[0] else 0.0


def _clamp(x):
    worst = x.min()
    if worst < -CLAMP_LIMIT:
        return None
    x = np.where(x < 0, 0.0, x)
    return x / x.sum()


def _direct(A: sp.csr_matrix, pin: int, refine_steps: int):
    """Sparse LU solve of ``pi Q = 0`` with the balance equation of state
    ``pin`` replaced by ``pi[pin] = 1``; normalised afterwards.

    ``pin`` must be recurrent.  Every other state then leaks to it, so the
    reduced matrix is a nonsingular M-matrix and LU needs no pivoting.
    """
    n = A.shape[0]
    if n == 1:
        return np.ones(1)
    keep = np.arange(n) != pin
    At = A.T.tocsr()
    M = At[keep][:, keep].tocsc()
    rhs = -At[keep][:, [pin]].toarray().ravel()
    try:
        lu = spla.splu(
            M, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
            options=dict(SymmetricMode=True),
        )
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    y = lu.solve(rhs)
    for _ in range(refine_steps):
        y = y + lu.solve(rhs - M @ y)
    x = np.empty(n)
    x[keep] = y
    x[pin] = 1.0
    if not np.all(np.isfinite(x)):
        raise SingularSystem("direct solve produced non-finite values")
    return x / x.sum()


def bandwidths(A: sp.csr_matrix) -> tuple[int, int]:
    coo = _pattern(A).tocoo()
    if coo.nnz == 0:
        return 0, 0
    diff = coo.col - coo.row
    return int(max(0, -diff.min())), int(max(0, diff.max()))


def _gth_irreducible(A: sp.csr_matrix) -> np.ndarray:
    n = A.shape[0]
    if n == 1:
        return np.ones(1)
    lower, upper = bandwidths(A)
    if n * (lower + upper + 1) > GTH_MAX_BAND_ENTRIES:
        raise DimensionTooLarge(
            f"GTH band {n} x {lower + upper + 1} exceeds {GTH_MAX_BAND_ENTRIES} entries"
        )
    coo = sp.coo_matrix(A)
    off = coo.row != coo.col
    band = _gth.to_band(coo.row[off], coo.col[off], coo.data[off], n, lower, upper)
    x, failed = _gth.gth_banded(band, lower, upper)
    if x is None:
        raise ReducibleChain(f"state {failed} cannot reach any lower-indexed state")
    return x


def gth_solve(Q) -> np.ndarray:
    """Stationary vector by GTH elimination on the banded generator.

    Transient states get probability zero; the elimination runs on the
    single closed class only.
    """
    A = _as_csr(Q)
    closed = recurrent_states(A)
    if len(closed) != 1:
        raise ReducibleChain(f"{len(closed)} recurrent classes")
    keep = closed[0]
    if len(keep) == A.shape[0]:
        return _gth_irreducible(A)
    x = np.zeros(A.shape[0])
    x[keep] = _gth_irreducible(A[keep][:, keep].tocsr())
    return x


def solve_stationary(Q, options: SolverOptions | None = None, **kwargs) -> StationaryDistribution:
    """Solve ``pi Q = 0`` with ``sum(pi) = 1``.

    The default path is a sparse LU solve of ``Q^T`` with one balance
    equation replaced by a pinning constraint, iterative refinement, then
    normalisation.  GTH is used when requested or when the direct answer is
    unusable.
    """
    opts = options or SolverOptions(**kwargs)
    if options is not None and kwargs:
        raise TypeError("pass either options or keyword arguments, not both")
    A = _as_csr(Q)
    n = A.shape[0]
    cap = max_states() if opts.max_states is None else opts.max_states
    if n > cap:
        raise DimensionTooLarge(f"{n} states exceeds cap {cap}")
    if n == 0:
        raise SingularSystem("empty generator")
    closed = recurrent_states(A)
    if len(closed) > 1:
        raise ReducibleChain(f"generator has {len(closed)} recurrent classes")

    method = opts.method.lower()
    if method not in ("auto", "direct", "gth"):
        raise ValueError(f"unknown method {opts.method!r}")

    if method in ("auto", "direct"):
        try:
            x = _clamp(_direct(A, int(closed[0][0]), opts.refine_steps))
        except SingularSystem:
            if method == "direct":
                raise
            x, why = None, "sparse LU failed"
        else:
            why = "direct solve produced negative probabilities"
        if x is not None:
            res = stationarity_residual(A, x)
            if res <= opts.tol:
                return StationaryDistribution(x, res, DIRECT)
            why = f"residual {res:.3e} above tolerance {opts.tol:.1e}"
        if method == "direct":
            raise SingularSystem(why)
        log.info("falling back to GTH: %s", why)

    x = gth_solve(A)
    res = stationarity_residual(A, x)
    if res > opts.tol:
        raise SingularSystem(f"GTH residual {res:.3e} above tolerance {opts.tol:.1e}")
    return StationaryDistribution(x, res, GTH)
