"""Result records shared by the norm, harness and CLI layers."""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np


def _clean(obj):
    """Make numpy scalars/arrays and non-finite floats JSON friendly."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


@dataclass
class EstimateReport:
    """Outcome of an empirical inequality check.

    ``lhs``/``rhs``/``ratio`` hold the headline pair (for single-evaluation
    checks); sampling checks fill ``constants`` with ``max_ratio``,
    ``min_ratio`` and a ``trend`` table instead.
    """

    operation: str
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    count: int = 0
    grid: dict | None = None
    epsilon: float | None = None
    lhs: float | None = None
    rhs: float | None = None
    constants: dict = field(default_factory=dict)
    skipped: int = 0
    passed: bool | None = None
    notes: list = field(default_factory=list)
    table: list = field(default_factory=list)

    @property
    def ratio(self):
        if self.lhs is None or self.rhs is None:
            return None
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else math.inf

    def as_dict(self):
        d = asdict(self)
        d["ratio"] = self.ratio
        return _clean(d)

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def table_csv(self):
        if not self.table:
            return ""
        buf = io.StringIO()
        # rows may differ in shape; the header is the ordered union of their keys
        keys = list(dict.fromkeys(k for row in self.table for k in row))
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for row in self.table:
            w.writerow({k: _fmt(row.get(k)) for k in keys})
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def norm_record(spec, grid, value, **extra):
    """JSON-ready record {spec, grid, value} for a norm evaluation."""
    rec = {"spec": spec.as_dict(), "grid": grid.as_dict(), "value": float(value)}
    rec.update(extra)
    return _clean(rec)
