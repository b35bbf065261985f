"""Dataset ingestion and result serialization.

The interaction interchange format is a UTF-8 CSV with the exact header
``winner,loser,type``; each row names the winner (or instigator), loser
(or recipient) and interaction type as strings.  Labels are mapped to
dense indices in first-appearance order, scanning the winner column before
the loser column within each row.

Fit results are written as a JSON document (per-individual strength, score
and rank; per-type valence; diagnostics) plus a companion flat CSV for
external plotting.  Output formatting is stable, so repeated runs of the
same fit diff clean.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import IO

import numpy as np

from multirank.em import FitResult
from multirank.model import Dataset
from multirank.synthetic import SyntheticTruth

HEADER = ("winner", "loser", "type")


class InteractionParseError(ValueError):
    """Malformed or invalid interaction file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _open_text(document) -> tuple[IO[str], bool]:
    if hasattr(document, "read"):
        return document, False
    return open(document, "r", encoding="utf-8-sig", newline=""), True


def parse_interactions(document) -> Dataset:
    """Read an interaction CSV (path or file-like) into a Dataset.

    Raises :class:`InteractionParseError` with a line number for a bad
    header, a row without exactly three columns, a self-interaction row,
    or a file with no data rows.
    """
    handle, owned = _open_text(document)
    try:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise InteractionParseError("empty file, expected header winner,loser,type", line=1)
        if tuple(header) != HEADER:
            raise InteractionParseError(
                f"expected header winner,loser,type, got {','.join(header)}", line=1
            )
        individuals: dict[str, int] = {}
        types: dict[str, int] = {}
        winners: list[int] = []
        losers: list[int] = []
        type_idx: list[int] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise InteractionParseError(f"expected 3 columns, got {len(row)}", line=lineno)
            w, l, t = row
            if w == l:
                raise InteractionParseError(f"self-interaction: {w!r} against itself", line=lineno)
            winners.append(individuals.setdefault(w, len(individuals)))
            losers.append(individuals.setdefault(l, len(individuals)))
            type_idx.append(types.setdefault(t, len(types)))
        if not winners:
            raise InteractionParseError("no interaction rows after the header", line=1)
    finally:
        if owned:
            handle.close()
    return Dataset.from_arrays(
        np.asarray(winners, dtype=np.int32),
        np.asarray(losers, dtype=np.int32),
        np.asarray(type_idx, dtype=np.int32),
        individual_labels=list(individuals),
        type_labels=list(types),
    )


def serialize_interactions(data: Dataset) -> str:
    """Render a Dataset back to interaction CSV text.

    Inverse of :func:`parse_interactions` for datasets whose label
    registries are in first-appearance order with every label referenced.
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for w, l, t in zip(data.winners, data.losers, data.types):
        writer.writerow(
            (data.individual_labels[w], data.individual_labels[l], data.type_labels[t])
        )
    return buf.getvalue()


def fit_result_document(result: FitResult, data: Dataset) -> dict:
    """The JSON-able fit report: individuals, types and diagnostics."""
    if len(result.params.strengths) != data.n_individuals:
        raise ValueError("result does not match dataset dimensions")
    ranks = np.empty(len(result.ranking), dtype=np.int64)
    ranks[result.ranking] = np.arange(1, len(result.ranking) + 1)
    individuals = [
        {
            "label": data.individual_labels[u],
            "strength": float(result.params.strengths[u]),
            "score": float(result.scores[u]),
            "rank": int(ranks[u]),
        }
        for u in range(data.n_individuals)
    ]
    type_labels = (
        data.type_labels if len(result.params.valences) == data.n_types else ("all",)
    )
    types = [
        {"label": type_labels[t], "valence": float(result.params.valences[t])}
        for t in range(len(result.params.valences))
    ]
    return {
        "individuals": individuals,
        "types": types,
        "diagnostics": {
            "mode": result.mode.value,
            "iterations": result.outer_iterations,
            "converged": result.converged,
            "flipped": result.oriented_flipped,
            "final_objective": float(result.objective_trace[-1]),
        },
    }


def fit_result_table(result: FitResult, data: Dataset) -> str:
    """Companion flat CSV: individual rows (label, score, rank), type rows (label, valence)."""
    doc = fit_result_document(result, data)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("kind", "label", "score", "rank", "valence"))
    for ind in doc["individuals"]:
        writer.writerow(("individual", ind["label"], repr(ind["score"]), ind["rank"], ""))
    for typ in doc["types"]:
        writer.writerow(("type", typ["label"], "", "", repr(typ["valence"])))
    return buf.getvalue()


def write_fit_result(result: FitResult, data: Dataset, path) -> dict:
    """Write the JSON report to ``path`` and the flat CSV next to it.

    The CSV lands at ``path`` with its suffix replaced by ``.csv``.
    Returns the JSON document.
    """
    path = Path(path)
    doc = fit_result_document(result, data)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    path.with_suffix(".csv").write_text(fit_result_table(result, data), encoding="utf-8")
    return doc


def truth_document(truth: SyntheticTruth) -> dict:
    """JSON sidecar for generated data: true scores, valences and stances."""
    return {
        "individuals": list(truth.dataset.individual_labels),
        "types": list(truth.dataset.type_labels),
        "scores": [float(s) for s in truth.true_scores],
        "valences": [float(q) for q in truth.true_valences],
        "stances": [int(b) for b in truth.true_stances],
    }


def write_truth(truth: SyntheticTruth, path) -> None:
    Path(path).write_text(json.dumps(truth_document(truth), indent=2) + "\n", encoding="utf-8")
