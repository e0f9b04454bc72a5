"""F1 comparison of windowed indices against gold, plus correlation stats.

Every query runs on both indices; per query, precision and recall are taken
over the two data-source sets and combined into F1; the report carries
per-query rows and the macro average (mean of per-query F1) per query kind.
Pearson and Spearman coefficients use two-sided p-values from the
t-distribution with n-2 degrees of freedom; Spearman is Pearson over
mid-ranks with ties averaged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from scipy.stats import t as _student_t

from .errors import DegenerateInput, EmptyGold, IncompatibleModel
from .index import Index
from .queries import Query, execute


def f1(gold: set[str] | frozenset[str], window: set[str] | frozenset[str]) -> tuple[float, float, float]:
    """(precision, recall, F1) of a window answer against a gold answer."""
    if not gold:
        raise EmptyGold("gold answer set is empty; queries are generated from gold")
    hits = len(gold & window)
    precision = hits / len(window) if window else 0.0
    recall = hits / len(gold)
    score = (
        2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    )
    return precision, recall, score


@dataclass(frozen=True)
class QueryScore:
    qid: str
    kind: str
    precision: float
    recall: float
    f1: float
    gold_size: int
    window_size: int

    def to_dict(self) -> dict:
        return {
            "id": self.qid,
            "kind": self.kind,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "gold_size": self.gold_size,
            "window_size": self.window_size,
        }


@dataclass
class F1Report:
    rows: list[QueryScore] = field(default_factory=list)
    macro_f1: dict[str, float] = field(default_factory=dict)
    query_counts: dict[str, int] = field(default_factory=dict)
    empty_gold: int = 0
    empty_window: int = 0

    def to_dict(self) -> dict:
        return {
            "metrics": {
                "macro_f1": self.macro_f1,
                "query_counts": self.query_counts,
                "empty_gold": self.empty_gold,
                "empty_window": self.empty_window,
            },
            "queries": [row.to_dict() for row in self.rows],
        }


def evaluate(gold: Index, approx: Index, queries: Sequence[Query]) -> F1Report:
    """Score every query on both indices and macro-average per kind.

    Queries with an empty gold answer cannot be scored; they are counted and
    excluded from the averages.
    """
    if gold.cfg.family() != approx.cfg.family():
        raise IncompatibleModel("indices belong to different model families or heights")
    report = F1Report()
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for q in queries:
        gold_answer = execute(gold, q).data_sources
        approx_answer = execute(approx, q).data_sources
        if not gold_answer:
            report.empty_gold += 1
            continue
        if not approx_answer:
            report.empty_window += 1
        precision, recall, score = f1(gold_answer, approx_answer)
        report.rows.append(
            QueryScore(
                q.qid, q.kind, precision, recall, score, len(gold_answer), len(approx_answer)
            )
        )
        sums[q.kind] = sums.get(q.kind, 0.0) + score
        counts[q.kind] = counts.get(q.kind, 0) + 1
    report.macro_f1 = {kind: sums[kind] / counts[kind] for kind in sorted(sums)}
    report.query_counts = dict(sorted(counts.items()))
    return report


@dataclass(frozen=True)
class Correlation:
    coefficient: float
    p_value: float
    n: int
    df: int

    def to_dict(self) -> dict:
        return {
            "coefficient": self.coefficient,
            "p_value": self.p_value,
            "n": self.n,
            "df": self.df,
        }


def _check_inputs(xs: Sequence[float], ys: Sequence[float]) -> int:
    if len(xs) != len(ys):
        raise DegenerateInput("input vectors differ in length")
    n = len(xs)
    if n < 3:
        raise DegenerateInput("need at least 3 points")
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        raise DegenerateInput("zero variance input")
    return n


def _p_two_sided(r: float, df: int) -> float:
    if 1.0 - r * r <= 0.0:
        return 0.0
    t = r * math.sqrt(df / (1.0 - r * r))
    return float(2.0 * _student_t.sf(abs(t), df))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> Correlation:
    """Sample Pearson correlation with a two-sided t-test p-value."""
    n = _check_inputs(xs, ys)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    cov = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    var_x = math.fsum((x - mean_x) ** 2 for x in xs)
    var_y = math.fsum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateInput("zero variance input")
    r = cov / math.sqrt(var_x * var_y)
    r = max(-1.0, min(1.0, r))
    df = n - 2
    return Correlation(r, _p_two_sided(r, df), n, df)


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their rank range."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = rank
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> Correlation:
    """Pearson correlation over mid-ranks, p-value as in pearson."""
    _check_inputs(xs, ys)
    return pearson(midranks(xs), midranks(ys))


@dataclass(frozen=True)
class CorrelationReport:
    pearson: Correlation
    spearman: Correlation

    def to_dict(self) -> dict:
        return {"pearson": self.pearson.to_dict(), "spearman": self.spearman.to_dict()}


def correlate(xs: Sequence[float], ys: Sequence[float]) -> CorrelationReport:
    return CorrelationReport(pearson(xs, ys), spearman(xs, ys))
