"""Verification report structure shared by all checking routines.

Verdicts: "pass" for exact certificates (pencil and eigenvalue tests),
"fail" for any detected violation, and "evidence-only" when a sampled
search found no violation.  Sampling can refute but never certify, so a
clean sampled run is evidence, not proof.  A "fail" always carries at
least one concrete witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "pass"
FAIL = "fail"
EVIDENCE = "evidence-only"


def _plain(obj: Any) -> Any:
    """Recursively convert numpy values for JSON output."""
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


@dataclass(frozen=True)
class VerificationReport:
    check: str
    verdict: str
    margin: float
    witnesses: tuple = ()
    sampling: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, EVIDENCE):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witnesses:
            raise ValueError("fail verdict requires at least one witness")

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "verdict": self.verdict,
            "margin": self.margin,
            "witnesses": _plain(list(self.witnesses)),
            "details": _plain(self.details),
        }
        if self.sampling is not None:
            out["sampling"] = _plain(self.sampling)
        return out
