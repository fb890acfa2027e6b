"""Link-prediction metrics: adjacency accuracy plus all-edge and new-edge
precision/recall/F1.

Undefined values follow the N/A convention: precision is undefined when the
predictor emits no positives for the edge class, recall when there are no
actual positives, and F1 when precision is undefined or precision + recall
is zero. Undefined values serialize as null (JSON) or "N/A" (CSV).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import UniverseMismatchError, YearRangeError
from .graph import EvolvingGraph, new_edges
from .scorer import PredictionResult


@dataclass(frozen=True)
class LinkMetrics:
    accuracy: float
    all_precision: float | None
    all_recall: float | None
    all_f1: float | None
    new_precision: float | None
    new_recall: float | None
    new_f1: float | None

    FIELD_NAMES = ("accuracy", "all_precision", "all_recall", "all_f1",
                   "new_precision", "new_recall", "new_f1")


def _prf(tp: int, predicted: int, actual: int) -> tuple[float | None, float | None, float | None]:
    precision = tp / predicted if predicted else None
    recall = tp / actual if actual else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def evaluate_prediction(truth: EvolvingGraph, predicted: PredictionResult,
                        test_year: int) -> LinkMetrics:
    """Compare a prediction against the truth snapshot at test_year.

    Accuracy counts agreement over all unordered concept pairs (no
    self-pairs). New-edge recall is over truth edges first appearing at
    test_year; new-edge precision is over predicted edges absent from the
    previous snapshot.
    """
    if not truth.t_start < test_year <= truth.t_end:
        raise YearRangeError(f"test_year {test_year} outside ({truth.t_start}, {truth.t_end}]")
    pred_edges = predicted.predicted_edges
    extra = {c for pair in pred_edges for c in pair} - truth.concepts
    if extra:
        raise UniverseMismatchError(extra)

    truth_edges = truth.edges(test_year)
    prior_edges = truth.edges(test_year - 1)
    truth_new = new_edges(truth, test_year)
    n = truth.num_concepts
    total_pairs = n * (n - 1) // 2

    wrong = len(pred_edges ^ truth_edges)
    accuracy = (total_pairs - wrong) / total_pairs if total_pairs else 1.0

    all_p, all_r, all_f1 = _prf(len(pred_edges & truth_edges), len(pred_edges), len(truth_edges))

    pred_new = pred_edges - prior_edges
    new_p, new_r, new_f1 = _prf(len(pred_new & truth_new), len(pred_new), len(truth_new))

    return LinkMetrics(accuracy=accuracy,
                       all_precision=all_p, all_recall=all_r, all_f1=all_f1,
                       new_precision=new_p, new_recall=new_r, new_f1=new_f1)


def aggregate_metrics(per_graph: list[LinkMetrics]) -> LinkMetrics:
    """Unweighted mean per field, skipping undefined entries.

    A field is undefined in the aggregate only when undefined in every input.
    """
    if not per_graph:
        raise ValueError("cannot aggregate an empty metrics list")
    values = {}
    for name in LinkMetrics.FIELD_NAMES:
        defined = [getattr(m, name) for m in per_graph if getattr(m, name) is not None]
        if not defined:
            values[name] = None
        elif min(defined) == max(defined):
            values[name] = defined[0]  # exact, avoids float drift on equal inputs
        else:
            values[name] = sum(defined) / len(defined)
    return LinkMetrics(**values)


def metrics_to_payload(m: LinkMetrics) -> dict:
    return {name: getattr(m, name) for name in LinkMetrics.FIELD_NAMES}


def metrics_to_json(m: LinkMetrics) -> str:
    return json.dumps(metrics_to_payload(m), indent=2) + "\n"


def metrics_to_csv(metrics: list[LinkMetrics]) -> str:
    """CSV with three-decimal values and the literal N/A for undefined fields."""
    def cell(v: float | None) -> str:
        return "N/A" if v is None else f"{v:.3f}"

    lines = [",".join(LinkMetrics.FIELD_NAMES)]
    for m in metrics:
        lines.append(",".join(cell(getattr(m, name)) for name in LinkMetrics.FIELD_NAMES))
    return "\n".join(lines) + "\n"


def load_metrics_json(path: str | Path) -> LinkMetrics:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return LinkMetrics(**{name: payload[name] for name in LinkMetrics.FIELD_NAMES})
