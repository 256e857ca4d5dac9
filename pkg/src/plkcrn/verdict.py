from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Conclusion(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not_applicable"
    EVIDENCE_ONLY = "evidence_only"


@dataclass(frozen=True)
class Hypothesis:
    label: str
    ok: bool
    witness: Any = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of a theorem check.

    ``conclusion`` is NOT_APPLICABLE exactly when some hypothesis is false.
    EVIDENCE_ONLY marks claims that rest on an incomplete equilibria search.
    """

    name: str
    hypotheses: tuple[Hypothesis, ...]
    conclusion: Conclusion
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        failed = any(not h.ok for h in self.hypotheses)
        if failed != (self.conclusion is Conclusion.NOT_APPLICABLE):
            raise ValueError(
                f"verdict {self.name!r}: conclusion {self.conclusion.value} inconsistent with hypotheses"
            )

    @property
    def holds(self) -> bool:
        return self.conclusion is Conclusion.HOLDS

    def __bool__(self) -> bool:
        return self.holds


def verdict(name: str, hypotheses, conclusion_if_ok: Conclusion, payload: dict | None = None) -> Verdict:
    """Build a verdict, downgrading to NOT_APPLICABLE when a hypothesis fails."""
    hyps = tuple(hypotheses)
    if any(not h.ok for h in hyps):
        conclusion_if_ok = Conclusion.NOT_APPLICABLE
    return Verdict(name, hyps, conclusion_if_ok, dict(payload or {}))
