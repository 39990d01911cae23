"""Scoring predictions against a generated dataset and rendering the Acc/Δ table."""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

import httpx

from . import inference, text
from .genset import VARIANT_KINDS, Dataset, record_theory

log = logging.getLogger(__name__)

LABELS = ("T", "F")
BASELINES = ("oracle", "chain-template", "constant-true", "constant-false", "random")


class ScoringError(ValueError):
    pass


class MissingPredictionError(ScoringError):
    pass


class DuplicatePredictionError(ScoringError):
    pass


class UnknownIdError(ScoringError):
    pass


class UnknownBaselineError(ValueError):
    pass


@dataclass(frozen=True)
class PredictionRecord:
    group_id: int
    variant: str
    question_index: int
    label: str

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.variant, self.group_id, self.question_index)


def record_key(record: dict) -> tuple[str, int, int]:
    return (record["variant"], record["group_id"], record["question_index"])


def record_id(record: dict) -> str:
    return "{}:{}:{}".format(*record_key(record))


def _round4(x: Fraction) -> float:
    d = Decimal(x.numerator) / Decimal(x.denominator)
    value = float(d.quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))
    return value + 0.0  # no negative zero


@dataclass
class SplitResult:
    split: str
    correct: int
    total: int
    accuracy: float
    delta: float


@dataclass
class EvalReport:
    predictor: str
    manifest_hash: str
    rows: list[SplitResult]
    flagged: bool = False
    missing: list[str] = field(default_factory=list)

    def row(self, split: str) -> SplitResult:
        for r in self.rows:
            if r.split == split:
                return r
        raise KeyError(split)

    def accuracies(self) -> dict[str, float]:
        return {r.split: r.accuracy for r in self.rows}

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> EvalReport:
        rows = [SplitResult(**r) for r in d["rows"]]
        return cls(d["predictor"], d["manifest_hash"], rows, d.get("flagged", False),
                   list(d.get("missing", [])))


def score(dataset: Dataset, predictions: Iterable[PredictionRecord],
          predictor: str = "predictions", permissive: bool = False) -> EvalReport:
    """Accuracy per split and Δ against the base row.

    The base row covers the held-out base groups; every variant row covers all
    groups. Δ is taken between the reported (4-decimal) accuracies so the table
    arithmetic is exact. In permissive mode missing predictions count as wrong
    and the report is flagged.
    """
    splits = dataset.scored_splits()
    gold = {record_key(r): r["label"] for recs in splits.values() for r in recs}
    seen: dict[tuple, str] = {}
    for p in predictions:
        if p.key not in gold:
            raise UnknownIdError(f"prediction for unknown question {p.key}")
        if p.key in seen:
            raise DuplicatePredictionError(f"duplicate prediction for {p.key}")
        if p.label not in LABELS:
            raise ScoringError(f"label {p.label!r} for {p.key} is not T or F")
        seen[p.key] = p.label
    missing = [k for k in gold if k not in seen]
    if missing and not permissive:
        raise MissingPredictionError(
            f"{len(missing)} questions have no prediction, e.g. {missing[0]}")

    rows = []
    base_acc = None
    for split, recs in splits.items():
        correct = sum(seen.get(record_key(r)) == r["label"] for r in recs)
        acc = _round4(Fraction(correct, len(recs))) if recs else 0.0
        if base_acc is None:
            base_acc = acc
        delta = _round4(Fraction(str(acc)) - Fraction(str(base_acc)))
        rows.append(SplitResult(split, correct, len(recs), acc, delta))
    return EvalReport(predictor, dataset.manifest_hash, rows, bool(missing),
                      ["{}:{}:{}".format(*k) for k in missing])


# -- baselines -------------------------------------------------------------


def _scored_records(dataset: Dataset) -> list[dict]:
    return [r for recs in dataset.scored_splits().values() for r in recs]


def oracle_label(record: dict) -> str:
    theory, question = record_theory(record)
    return inference.to_label(inference.answer(theory, question))


def run_baseline(dataset: Dataset, name: str, seed: Optional[int] = None) -> list[PredictionRecord]:
    if name not in BASELINES:
        raise UnknownBaselineError(f"unknown baseline {name!r}; choose from {', '.join(BASELINES)}")
    records = _scored_records(dataset)
    if name == "oracle":
        pick = oracle_label
    elif name == "chain-template":
        # Answers from the memorised base chain, blind to the perturbation.
        base = dataset.base_labels()
        pick = lambda r: base[(r["group_id"], r["question_index"])]  # noqa: E731
    elif name == "constant-true":
        pick = lambda r: "T"  # noqa: E731
    elif name == "constant-false":
        pick = lambda r: "F"  # noqa: E731
    else:
        rng = random.Random(0 if seed is None else seed)
        pick = lambda r: rng.choice(LABELS)  # noqa: E731
    return [PredictionRecord(r["group_id"], r["variant"], r["question_index"], pick(r))
            for r in records]


# -- prediction files ------------------------------------------------------


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                out.append(PredictionRecord(int(d["group_id"]), str(d["variant"]),
                                            int(d["question_index"]), str(d["label"])))
            except (ValueError, KeyError, TypeError) as exc:
                raise ScoringError(f"{path}:{lineno}: bad prediction record ({exc})") from None
    return out


def write_predictions(predictions: Iterable[PredictionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in predictions:
            fh.write(json.dumps(asdict(p)) + "\n")


# -- remote models ---------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    id: str
    kind: str  # "transport" | "malformed-response" | "timeout"
    detail: str


@dataclass
class FailureReport:
    failures: list[Failure] = field(default_factory=list)

    @property
    def ids(self) -> list[str]:
        return [f.id for f in self.failures]

    def __bool__(self) -> bool:
        return bool(self.failures)

    def summary(self) -> str:
        lines = [f"{len(self.failures)} remote record(s) failed"]
        lines += [f"  {f.id}  {f.kind}: {f.detail}" for f in self.failures]
        return "\n".join(lines)


class RemoteFetchError(ScoringError):
    def __init__(self, report: FailureReport):
        super().__init__(report.summary())
        self.report = report


def record_prompt(record: dict) -> str:
    return text.serialize_prompt(
        text.RenderedInstance(tuple(record["facts"]), tuple(record["rules"]), record["question"]))


def _ask(client: httpx.Client, endpoint: str, record: dict):
    rid = record_id(record)
    try:
        resp = client.post(endpoint, json={"id": rid, "prompt": record_prompt(record)})
        resp.raise_for_status()
    except httpx.TimeoutException as exc:
        return Failure(rid, "timeout", str(exc) or type(exc).__name__)
    except httpx.HTTPError as exc:
        return Failure(rid, "transport", str(exc) or type(exc).__name__)
    try:
        body = resp.json()
    except ValueError:
        return Failure(rid, "malformed-response", "response is not JSON")
    if not isinstance(body, dict) or body.get("id") != rid:
        return Failure(rid, "malformed-response", f"id mismatch: {body!r:.80}")
    label = body.get("label")
    if label not in LABELS:
        return Failure(rid, "malformed-response", f"label {label!r} is not T or F")
    return PredictionRecord(record["group_id"], record["variant"], record["question_index"], label)


def fetch_remote_predictions(dataset: Dataset, endpoint: str, timeout: float = 30.0,
                             max_workers: int = 8, strict: bool = True,
                             transport: Optional[httpx.BaseTransport] = None,
                             ) -> tuple[list[PredictionRecord], FailureReport]:
    """POST ``{id, prompt}`` per scored question; expect ``{id, label}`` back.

    Failed records are collected, never guessed. Strict mode raises
    :class:`RemoteFetchError` when anything failed.
    """
    records = _scored_records(dataset)
    with httpx.Client(timeout=timeout, transport=transport) as client:
        with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
            results = list(pool.map(lambda r: _ask(client, endpoint, r), records))
    predictions = [r for r in results if isinstance(r, PredictionRecord)]
    failures = FailureReport([r for r in results if isinstance(r, Failure)])
    if failures:
        log.warning("%d of %d remote requests failed", len(failures.failures), len(records))
        if strict:
            raise RemoteFetchError(failures)
    return predictions, failures


# -- rendering -------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x + 0.0:.4f}"


def render_report(report: EvalReport) -> str:
    order = {k: i for i, k in enumerate(VARIANT_KINDS)}
    rows = sorted(report.rows, key=lambda r: order.get(r.split, len(order)))
    width = max([len("Split")] + [len(r.split) for r in rows])
    lines = [f"predictor: {report.predictor}",
             f"{'Split':<{width}}  {'Acc':>6}  {'Δ':>7}  {'n':>4}"]
    for r in rows:
        lines.append(f"{r.split:<{width}}  {_fmt(r.accuracy):>6}  {_fmt(r.delta):>7}  {r.total:>4}")
    if report.flagged:
        lines.append(f"flagged: {len(report.missing)} unanswered question(s) scored as incorrect")
    return "\n".join(lines)


def write_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")


def read_report(path: str | Path) -> EvalReport:
    return EvalReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
