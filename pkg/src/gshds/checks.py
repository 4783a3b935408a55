"""A tiny record type for verified identities."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def all_ok(checks) -> bool:
    return all(c.ok for c in checks)


def first_failure(checks) -> Check | None:
    return next((c for c in checks if not c.ok), None)
