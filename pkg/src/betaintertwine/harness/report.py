"""Report records and the JSON report file."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field


@dataclass
class ReportRecord:
    """Outcome of one check.

    ``tolerance`` is an absolute bound for deterministic checks (``stderr``
    is ``None``) and a multiple of the standard error for statistical ones.
    """

    suite: str
    check: str
    inputs: dict
    observed: float
    target: float
    tolerance: float
    passed: bool
    stderr: float | None = None
    control: bool = False
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def consistent(self) -> bool:
        """Does ``passed`` agree with the observed gap and the tolerance rule?"""
        gap = abs(self.observed - self.target)
        if not math.isfinite(gap):
            return not self.passed
        bound = self.tolerance if self.stderr is None else self.tolerance * self.stderr
        if self.stderr == 0:
            bound = 1e-12 * max(1.0, abs(self.target))
        return self.passed == (gap <= bound)

    def to_dict(self, timing=True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("wall_time")
        return d


def _clean(obj):
    # JSON has no inf/nan; encode them as strings so reports stay valid
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def summarize(records, config, version) -> dict:
    failures = [f"{r.suite}/{r.check}" for r in records if not r.passed]
    return {
        "total": len(records),
        "passed": len(records) - len(failures),
        "failed": len(failures),
        "failures": failures,
        "suites": sorted({r.suite for r in records}),
        "seed": config.seed,
        "control": config.control,
        "version": version,
    }


def render(records, summary, timing=True) -> str:
    payload = {"records": [r.to_dict(timing) for r in records], "summary": summary}
    return json.dumps(_clean(payload), indent=1, sort_keys=True) + "\n"


def write_report(path, records, summary, timing=True):
    with open(path, "w") as fh:
        fh.write(render(records, summary, timing))
