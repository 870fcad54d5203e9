"""Run configuration and per-iteration traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from ..errors import NonPositiveStep

ALGORITHMS = ("su", "sgs")

CSV_HEADER = ["iter", "node", "edge", "grad_sq", "suboptimality"]


@dataclass
class RunConfig:
    """Inputs of a simulation run.

    ``eta=None`` selects the descent-guaranteeing step ``1/L``; an explicit
    positive value overrides it (descent is no longer guaranteed above 1/L).
    """

    algorithm: str
    iterations: int
    seed: int = 0
    eta: float | None = None
    record_every: int = 100
    drift_check_every: int = 10_000

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.iterations <= 0:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if self.eta is not None and self.eta <= 0:
            raise NonPositiveStep(f"eta must be positive, got {self.eta}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class TraceRow:
    iter: int
    node: int
    edge: int
    grad_sq: float
    suboptimality: float


@dataclass
class Trace:
    """Columnar recording of a run (thinned to the record cadence)."""

    iters: np.ndarray
    nodes: np.ndarray
    edges: np.ndarray
    grad_sq: np.ndarray
    suboptimality: np.ndarray
    messages: int = 0
    resyncs: int = 0
    config: RunConfig | None = None
    final_state: object = None

    def __len__(self) -> int:
        return len(self.iters)

    def rows(self) -> Iterator[TraceRow]:
        for k in range(len(self.iters)):
            yield TraceRow(
                int(self.iters[k]),
                int(self.nodes[k]),
                int(self.edges[k]),
                float(self.grad_sq[k]),
                float(self.suboptimality[k]),
            )

    @property
    def final_suboptimality(self) -> float:
        return float(self.suboptimality[-1])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for k in range(len(self.iters)):
                w.writerow(
                    [
                        int(self.iters[k]),
                        int(self.nodes[k]),
                        int(self.edges[k]),
                        repr(float(self.grad_sq[k])),
                        repr(float(self.suboptimality[k])),
                    ]
                )

    @classmethod
    def from_csv(cls, path: str | Path) -> "Trace":
        iters, nodes, edges, gsq, sub = [], [], [], [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"unexpected trace header {header}")
            for row in reader:
                iters.append(int(row[0]))
                nodes.append(int(row[1]))
                edges.append(int(row[2]))
                gsq.append(float(row[3]))
                sub.append(float(row[4]))
        return cls(
            np.asarray(iters, dtype=np.int64),
            np.asarray(nodes, dtype=np.int32),
            np.asarray(edges, dtype=np.int32),
            np.asarray(gsq),
            np.asarray(sub),
        )

    def sidecar_dict(self) -> dict:
        """Summary written next to the CSV by the CLI."""
        out = {
            "messages": int(self.messages),
            "resyncs": int(self.resyncs),
            "recorded_rows": len(self.iters),
            "final_iter": int(self.iters[-1]),
            "final_suboptimality": self.final_suboptimality,
        }
        if self.config is not None:
            out.update(
                {
                    "algorithm": self.config.algorithm,
                    "iterations": self.config.iterations,
                    "seed": self.config.seed,
                    "eta": self.config.eta,
                    "record_every": self.config.record_every,
                }
            )
        return out
