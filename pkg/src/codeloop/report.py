"""In-band verification reports and deterministic random sources."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def rng_for(seed: int, suite: str) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, suite)``.

    Philox is keyed rather than stateful-seeded, so every suite draws from an
    independent stream that does not depend on which other suites ran.
    """
    digest = hashlib.blake2b(f"{seed}:{suite}".encode(), digest_size=16).digest()
    key = np.frombuffer(digest, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class Check:
    name: str
    checks: int = 0
    failures: int = 0
    witness: Any = None
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: int, total: int, witness=None) -> None:
        self.checks += total
        bad = total - ok
        self.failures += bad
        if bad and self.witness is None:
            self.witness = witness


@dataclass
class Report:
    suite: str
    mode: str = "exhaustive"
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seed: int | None = None
    data: dict = field(default_factory=dict)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        c = Check(name)
        self.checks.append(c)
        return c

    def add(self, name: str, ok: bool, witness=None) -> None:
        self.check(name).record(int(bool(ok)), 1, None if ok else witness)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "mode": self.mode,
            "seed": self.seed,
            "checks": [
                {
                    "name": c.name,
                    "checks": c.checks,
                    "failures": c.failures,
                    "skipped": c.skipped,
                    "witness": _jsonable(c.witness),
                }
                for c in self.checks
            ],
            "notes": list(self.notes),
            **({"data": _jsonable(self.data)} if self.data else {}),
        }

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"[{status}] {self.suite} (mode={self.mode}"
        head += f", seed={self.seed})" if self.seed is not None else ")"
        lines = [head]
        for c in self.checks:
            line = f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.checks} checks, {c.failures} failures"
            if c.skipped:
                line += f", {c.skipped} skipped"
            if c.witness is not None:
                line += f", witness {_jsonable(c.witness)}"
            lines.append(line)
        lines += [f"    note: {n}" for n in self.notes]
        for k, v in self.data.items():
            lines.append(f"    {k}: {_jsonable(v)}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)
