"""Machine-readable pass/fail records for every property suite."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one verification suite.

    A failing report always carries at least one witness.  Witnesses are
    plain JSON-ready dicts (rendered inputs, integer perversities, bounds),
    sorted worst-first by the suite that produced them, so reports are
    deterministic and diffable.
    """

    suite: str
    passed: bool
    witnesses: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.passed and not self.witnesses:
            raise ValueError("failing report must carry a witness")

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> str:
        payload = {
            "suite": self.suite,
            "status": self.status,
            "witnesses": self.witnesses,
            "info": self.info,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def render_text(self) -> str:
        lines = [f"suite {self.suite}: {self.status}"]
        for key in sorted(self.info):
            lines.append(f"  {key} = {self.info[key]}")
        for w in self.witnesses:
            parts = ", ".join(f"{k}={w[k]}" for k in sorted(w))
            lines.append(f"  witness: {parts}")
        return "\n".join(lines)
