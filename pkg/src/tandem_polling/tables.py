"""Published result tables, their reproduction, buffer sweeps and CSV output."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .measures import NetworkReport, analyze
from .model import NetworkParams, Strategy
from .solver import SolverOptions

N_VALUES = (3, 6, 9, 12, 15)
STRATEGIES = (Strategy.SP, Strategy.OP)

CSV_HEADER = (
    "strategy", "n1", "n2",
    "th11", "th21", "th12", "th22",
    "l11", "l21", "l12", "l22",
    "w11", "w21", "w12", "w22", "w1", "w2", "wip",
)
CSV_SIGNIFICANT = 15


def _panel_params(table: int, panel: str) -> NetworkParams:
    """Rates from the table headers, with a placeholder buffer size."""
    if table == 2:
        mu = 4.0 if panel == "top" else 2.5
        return NetworkParams.symmetric(1.0, mu, mu, 5.0, 1)
    if table == 3:
        mu1, mu2 = (2.5, 4.0) if panel == "top" else (4.0, 2.5)
        return NetworkParams.symmetric(1.0, mu1, mu2, 5.0, 1)
    if table == 4:
        mu2j = 3.13 if panel == "top" else 6.25
        return NetworkParams(1.0, 1.0, 2.5, mu2j, 2.5, mu2j, 5.0, 5.0, 1, 1)
    raise ValueError(f"unknown table {table!r}")


def panel_params(table: int, panel: str, n: int) -> NetworkParams:
    if panel not in ("top", "bottom"):
        raise ValueError(f"panel must be 'top' or 'bottom', got {panel!r}")
    return _panel_params(table, panel).with_buffers(n, n)


# Printed columns, and the report fields each one stands for.  Columns headed
# with a generic product index ``i`` are compared for both products.
COLUMNS = {
    2: ("TH_i1", "TH_i2", "W_i"),
    3: ("TH_i2", "W_i1", "W_i2", "W_i"),
    4: ("TH_12", "TH_22", "W_1", "W_2"),
}
_FIELDS = {
    "TH_i1": ("th_11", "th_21"),
    "TH_i2": ("th_12", "th_22"),
    "W_i1": ("w_11", "w_21"),
    "W_i2": ("w_12", "w_22"),
    "W_i": ("w_1", "w_2"),
    "TH_12": ("th_12",),
    "TH_22": ("th_22",),
    "W_1": ("w_1",),
    "W_2": ("w_2",),
}

# PUBLISHED_VALUES[table][panel][strategy] -> one tuple per N in N_VALUES
PUBLISHED_VALUES = {
    2: {
        "top": {
            "SP": [(0.94, 0.70, 3.85), (1.00, 0.85, 5.31), (1.00, 0.90, 6.84),
                   (1.00, 0.92, 8.35), (1.00, 0.94, 9.86)],
            "OP": [(0.94, 0.54, 4.02), (1.00, 0.71, 5.58), (1.00, 0.80, 7.08),
                   (1.00, 0.84, 8.57), (1.00, 0.87, 10.07)],
        },
        "bottom": {
            "SP": [(0.85, 0.64, 4.61), (0.95, 0.81, 6.43), (0.98, 0.88, 8.18),
                   (0.99, 0.91, 9.85), (1.00, 0.93, 11.45)],
            "OP": [(0.85, 0.47, 4.97), (0.95, 0.61, 7.23), (0.98, 0.70, 9.16),
                   (0.99, 0.77, 10.91), (1.00, 0.81, 12.55)],
        },
    },
    3: {
        "top": {
            "SP": [(0.76, 1.34, 2.15, 3.49), (0.93, 1.88, 2.32, 4.20), (0.97, 2.21, 2.40, 4.61),
                   (0.99, 2.42, 2.43, 4.84), (1.00, 2.54, 2.43, 4.96)],
            "OP": [(0.53, 1.34, 2.63, 3.97), (0.70, 1.88, 3.65, 5.54), (0.80, 2.21, 4.43, 6.64),
                   (0.87, 2.42, 5.03, 7.44), (0.91, 2.54, 5.48, 8.02)],
        },
        "bottom": {
            "SP": [(0.52, 0.80, 4.84, 5.64), (0.61, 0.88, 8.48, 9.36), (0.62, 0.90, 12.86, 13.76),
                   (0.62, 0.90, 17.51, 18.41), (0.62, 0.90, 22.27, 22.27)],
            "OP": [(0.52, 0.80, 3.97, 4.77), (0.60, 0.88, 7.26, 8.14), (0.61, 0.90, 11.11, 12.01),
                   (0.62, 0.90, 15.30, 16.20), (0.62, 0.90, 19.72, 20.62)],
        },
    },
    4: {
        "top": {
            "SP": [(0.66, 0.65, 4.31, 4.44), (0.84, 0.82, 5.93, 6.14), (0.89, 0.89, 7.55, 7.76),
                   (0.92, 0.92, 9.12, 9.32), (0.94, 0.94, 10.66, 10.85)],
            "OP": [(0.44, 0.52, 5.36, 4.15), (0.59, 0.70, 7.86, 5.76), (0.67, 0.80, 10.23, 7.01),
                   (0.71, 0.87, 12.67, 6.15), (0.74, 0.91, 15.24, 8.88)],
        },
        "bottom": {
            "SP": [(0.69, 0.68, 3.94, 4.16), (0.85, 0.83, 5.44, 5.72), (0.90, 0.89, 7.00, 7.22),
                   (0.92, 0.92, 8.53, 8.72), (0.94, 0.94, 10.05, 10.22)],
            "OP": [(0.31, 0.65, 8.47, 2.83), (0.38, 0.85, 14.31, 3.50), (0.39, 0.94, 20.98, 3.85),
                   (0.40, 0.98, 28.14, 4.03), (0.40, 0.99, 35.52, 4.12)],
        },
    },
}


@dataclass(frozen=True)
class KnownTypo:
    printed: float
    expected_corrected: float
    note: str


# Cells whose printed value is inconsistent with the rest of the table.  The
# corrected values were computed with this package (two decimals).
KNOWN_TYPOS = {
    (3, "bottom", "SP", 15, "W_i"): KnownTypo(
        22.27, 23.17, "total waiting time printed equal to W_i2; W_i1 + W_i2 = 0.90 + 22.27"
    ),
    (4, "top", "OP", 12, "W_2"): KnownTypo(
        6.15, 8.02, "breaks the monotone column 7.01 -> 6.15 -> 8.88"
    ),
}

# Header annotations that disagree with the header's own rates.
HEADER_NOTES = {
    (4, "bottom"): "ratio mu_1j / mu_2j printed as 0.80; the rates 2.50 / 6.25 give 0.40",
}


@dataclass(frozen=True)
class TableRow:
    """One (buffer size, strategy) line at full precision; round only for display."""

    n: int
    strategy: Strategy
    th_11: float
    th_21: float
    th_12: float
    th_22: float
    w_1: float
    w_2: float
    w_11: float
    w_12: float
    w_21: float
    w_22: float
    wip: float
    report: NetworkReport = field(repr=False, compare=False)

    @classmethod
    def from_report(cls, n: int, report: NetworkReport) -> "TableRow":
        r1, r2 = report[1], report[2]
        return cls(
            n, report.strategy,
            r1.th_i1, r2.th_i1, r1.th_i2, r2.th_i2,
            r1.w_i, r2.w_i, r1.w_i1, r1.w_i2, r2.w_i1, r2.w_i2,
            report.wip, report,
        )

    def display(self) -> dict:
        out = {"n": self.n, "strategy": self.strategy.value}
        for name in ("th_11", "th_21", "th_12", "th_22", "w_1", "w_2",
                     "w_11", "w_12", "w_21", "w_22", "wip"):
            out[name] = f"{getattr(self, name):.2f}"
        return out


@dataclass(frozen=True)
class CellDiff:
    table: int
    panel: str
    strategy: str
    n: int
    column: str
    field: str
    published: float
    computed: float
    typo: KnownTypo | None = None

    @property
    def deviation(self) -> float:
        return abs(self.computed - self.published)

    @property
    def corrected_deviation(self) -> float | None:
        return None if self.typo is None else abs(self.computed - self.typo.expected_corrected)


@dataclass(frozen=True)
class TableReproduction:
    table: int
    panel: str
    rows: list[TableRow]
    diffs: list[CellDiff]

    def strict_failures(self, tol: float) -> list[CellDiff]:
        """Cells off by more than ``tol``, excluding flagged typo cells."""
        return [d for d in self.diffs if d.typo is None and not d.deviation <= tol]


def solve_rows(
    params: NetworkParams,
    strategies: Iterable[Strategy],
    buffers: Sequence[tuple[int, int]],
    options: SolverOptions | None = None,
) -> list[TableRow]:
    rows = []
    for n1, n2 in buffers:
        for strategy in strategies:
            report = analyze(params.with_buffers(n1, n2), strategy, options)
            rows.append(TableRow.from_report(n1, report))
    return rows


def table_diffs(table: int, panel: str, rows: Sequence[TableRow]) -> list[CellDiff]:
    by_key = {(row.n, row.strategy.value): row for row in rows}
    diffs = []
    for strategy, lines in PUBLISHED_VALUES[table][panel].items():
        for n, printed in zip(N_VALUES, lines):
            row = by_key[(n, strategy)]
            for column, value in zip(COLUMNS[table], printed):
                typo = KNOWN_TYPOS.get((table, panel, strategy, n, column))
                for name in _FIELDS[column]:
                    diffs.append(
                        CellDiff(table, panel, strategy, n, column, name, value,
                                 getattr(row, name), typo)
                    )
    return diffs


def reproduce_table(table: int, panel: str, options: SolverOptions | None = None) -> TableReproduction:
    """Solve both strategies for every buffer size of a published panel."""
    params = panel_params(table, panel, 1)
    rows = solve_rows(params, STRATEGIES, [(n, n) for n in N_VALUES], options)
    return TableReproduction(table, panel, rows, table_diffs(table, panel, rows))


# --- buffer sweeps ---------------------------------------------------------

SATURATION_STEP = 1e-3
SATURATION_GAP = 0.05


@dataclass(frozen=True)
class Saturation:
    strategy: Strategy
    product: int
    n: int
    throughput: float
    arrival_rate: float


def detect_saturation(
    ns: Sequence[int], throughputs: Sequence[float], arrival_rate: float,
    step: float = SATURATION_STEP, gap: float = SATURATION_GAP,
) -> tuple[int, float] | None:
    """First buffer size at which station-2 throughput stops growing while
    still short of the arrival rate; ``None`` if it never does."""
    for k in range(1, len(throughputs)):
        if throughputs[k] - throughputs[k - 1] < step and arrival_rate - throughputs[k] > gap:
            return ns[k], throughputs[k]
    return None


@dataclass(frozen=True)
class SweepResult:
    rows: list[TableRow]
    saturation: list[Saturation]


def sweep_buffers(
    params: NetworkParams,
    strategies: Iterable[Strategy],
    buffers: Sequence[tuple[int, int]],
    options: SolverOptions | None = None,
) -> SweepResult:
    strategies = list(strategies)
    rows = solve_rows(params, strategies, buffers, options)
    found = []
    for strategy in strategies:
        mine = [r for r in rows if r.strategy is strategy]
        ns = [r.n for r in mine]
        for product, name in ((1, "th_12"), (2, "th_22")):
            hit = detect_saturation(ns, [getattr(r, name) for r in mine], params.lam(product))
            if hit is not None:
                found.append(Saturation(strategy, product, hit[0], hit[1], params.lam(product)))
    return SweepResult(rows, found)


# --- CSV -------------------------------------------------------------------

def _fmt(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return f"{value:.{CSV_SIGNIFICANT}g}"


def csv_record(row: TableRow) -> list[str]:
    r1, r2 = row.report[1], row.report[2]
    p = row.report.params
    values = (
        r1.th_i1, r2.th_i1, r1.th_i2, r2.th_i2,
        r1.L_i1, r2.L_i1, r1.L_i2, r2.L_i2,
        r1.w_i1, r2.w_i1, r1.w_i2, r2.w_i2,
        r1.w_i, r2.w_i, row.report.wip,
    )
    return [row.strategy.value, str(p.n1), str(p.n2), *(_fmt(v) for v in values)]


def write_csv(rows: Iterable[TableRow], fh) -> int:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    n = 0
    for row in rows:
        writer.writerow(csv_record(row))
        n += 1
    return n


def rows_to_csv(rows: Iterable[TableRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    """Parse CSV produced by :func:`write_csv` back into typed records."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for rec in reader:
        parsed = {"strategy": rec["strategy"], "n1": int(rec["n1"]), "n2": int(rec["n2"])}
        for key in CSV_HEADER[3:]:
            parsed[key] = float(rec[key])
        out.append(parsed)
    return out
