"""Run reports shared by every CLI command.

One :class:`RunReport` record feeds both renderings: ``machine`` dumps the
record as a canonical document, ``text`` formats the same fields for
people. Wall-clock timings appear only in the text rendering so machine
output stays byte-stable for fixed seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .docfmt import dump_document

__all__ = ["RunReport", "EXIT_CODES", "TOOL_VERSION"]

TOOL_VERSION = "0.1.0"

# status -> process exit code
EXIT_CODES = {
    "valid": 0,
    "controllable": 0,
    "pass": 0,
    "ok": 0,
    "invalid": 1,
    "not_controllable": 1,
    "mismatch": 1,
    "indeterminate": 2,
    "input_error": 3,
}


@dataclass
class RunReport:
    command: list[str]
    status: str = "ok"
    arithmetic: str | None = None
    seeds: list[int] = field(default_factory=list)
    modules: list[dict] = field(default_factory=list)
    composite: dict | None = None
    resources: dict | None = None
    details: dict = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    output_format: str = "text"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def as_record(self) -> dict:
        rec: dict = {
            "tool_version": TOOL_VERSION,
            "command": list(self.command),
            "status": self.status,
            "exit_code": self.exit_code,
        }
        for key in ("arithmetic", "composite", "resources"):
            value = getattr(self, key)
            if value is not None:
                rec[key] = value
        if self.seeds:
            rec["seeds"] = list(self.seeds)
        if self.modules:
            rec["modules"] = [{k: v for k, v in m.items() if k != "seconds"} for m in self.modules]
        if self.details:
            rec["details"] = self.details
        if self.messages:
            rec["messages"] = list(self.messages)
        return rec

    def render(self, fmt: str | None = None) -> str:
        if (fmt or self.output_format) == "machine":
            return dump_document(self.as_record())
        return self.to_text()

    def to_text(self) -> str:
        lines = [f"status: {self.status} (exit {self.exit_code})"]
        if self.arithmetic:
            lines.append(f"arithmetic: {self.arithmetic}")
        if self.seeds:
            lines.append("seeds: " + ", ".join(map(str, self.seeds)))
        for m in self.modules:
            parts = [f"  {m.get('id', '?')}"]
            if "seed" in m:
                parts.append(f"seed {m['seed']}")
            if "dimension" in m:
                parts.append(f"dim {m['dimension']}/{m['full_dimension']}")
            if "controllable" in m:
                parts.append("controllable" if m["controllable"] else "not controllable")
            if m.get("truncated"):
                parts.append("truncated")
            if "depth_profile" in m:
                parts.append("depths " + ",".join(map(str, m["depth_profile"])))
            if "seconds" in m:
                parts.append(f"{m['seconds']:.3f}s")
            if m.get("reason"):
                parts.append(f"({m['reason']})")
            lines.append(" ".join(parts))
        if self.composite is not None:
            c = self.composite
            line = f"composite: {c.get('verdict')}"
            if c.get("reason"):
                line += f" ({c['reason']})"
            lines.append(line)
            for key in ("n", "leaf_closures", "redundant_links"):
                if key in c:
                    lines.append(f"  {key}: {c[key]}")
        if self.resources is not None:
            r = self.resources
            lines.append(
                f"resources: {r['local_controls']} local controls, {r['static_couplings']} static couplings, "
                f"{r['tunable_couplings']} tunable couplings"
            )
        for key in sorted(self.details):
            lines.append(f"{key}: {self.details[key]}")
        for key in sorted(self.timings):
            lines.append(f"time {key}: {self.timings[key]:.3f}s")
        lines.extend(self.messages)
        return "\n".join(lines) + "\n"
