"""Output recording: per-shot bitstrings, histogram aggregation, JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import RuntimeFault

JSON_SCHEMA_ID = "qirvm-result/1"


@dataclass
class ShotOutput:
    bitstring: str
    raw_bits: tuple
    labels: tuple = ()


class ShotRecorder:
    """Collects the record_* runtime calls of one shot."""

    def __init__(self):
        self.declared_len: Optional[int] = None
        self.entries = []  # (bit, label-or-None)

    def record_array(self, length: int, label: Optional[str] = None):
        if self.declared_len is not None:
            raise RuntimeFault("second array_record_output header in one shot")
        self.declared_len = length

    def record_result(self, bit: int, label: Optional[str] = None):
        self.entries.append((int(bit), label))

    def finalize(self) -> ShotOutput:
        if self.declared_len is not None and len(self.entries) != self.declared_len:
            raise RuntimeFault(
                f"array header declared {self.declared_len} results "
                f"but {len(self.entries)} were recorded"
            )
        bits = tuple(bit for bit, _ in self.entries)
        labels = tuple(label for _, label in self.entries)
        return ShotOutput("".join(str(b) for b in bits), bits, labels)


@dataclass
class RunResult:
    program_name: str
    backend_name: str
    shots: int
    seed: int
    rng_id: str
    num_qubits: int
    num_results: int
    histogram: dict
    labels: Optional[tuple] = None
    per_shot: Optional[tuple] = None


def aggregate(
    shot_outputs,
    *,
    program_name: str,
    backend_name: str,
    seed: int,
    rng_id: str,
    num_qubits: int,
    num_results: int,
    keep_per_shot: bool = False,
) -> RunResult:
    """Histogram shot bitstrings; all shots must record the same length."""
    outputs = list(shot_outputs)
    lengths = {len(s.bitstring) for s in outputs}
    if len(lengths) > 1:
        raise RuntimeFault(
            f"shots recorded different result counts: {sorted(lengths)}"
        )
    histogram = {}
    for s in outputs:
        histogram[s.bitstring] = histogram.get(s.bitstring, 0) + 1

    labels = None
    for s in outputs:
        if any(lbl is not None for lbl in s.labels):
            labels = s.labels
            break

    return RunResult(
        program_name=program_name,
        backend_name=backend_name,
        shots=len(outputs),
        seed=seed,
        rng_id=rng_id,
        num_qubits=num_qubits,
        num_results=num_results,
        histogram=histogram,
        labels=labels,
        per_shot=tuple(s.bitstring for s in outputs) if keep_per_shot else None,
    )


def emit_json(result: RunResult) -> str:
    """Serialize with fixed key order and sorted histogram keys.

    No timestamps or host metadata: equal inputs give byte-identical text.
    """
    doc = {
        "schema": JSON_SCHEMA_ID,
        "program": result.program_name,
        "backend": result.backend_name,
        "shots": result.shots,
        "seed": result.seed,
        "rng": result.rng_id,
        "num_qubits": result.num_qubits,
        "num_results": result.num_results,
        "labels": list(result.labels) if result.labels is not None else None,
        "histogram": {k: result.histogram[k] for k in sorted(result.histogram)},
        "per_shot": list(result.per_shot) if result.per_shot is not None else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_json(text: str) -> RunResult:
    doc = json.loads(text)
    if doc.get("schema") != JSON_SCHEMA_ID:
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    return RunResult(
        program_name=doc["program"],
        backend_name=doc["backend"],
        shots=doc["shots"],
        seed=doc["seed"],
        rng_id=doc["rng"],
        num_qubits=doc["num_qubits"],
        num_results=doc["num_results"],
        histogram=dict(doc["histogram"]),
        labels=tuple(doc["labels"]) if doc["labels"] is not None else None,
        per_shot=tuple(doc["per_shot"]) if doc["per_shot"] is not None else None,
    )
