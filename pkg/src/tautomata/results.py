"""Result values that are not ordinary answers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class _Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unknown"

    def __bool__(self):
        raise TypeError("Unknown has no truth value")


Unknown = _Unknown()


@dataclass(frozen=True)
class BudgetExhausted:
    """A closure computation stopped after ``explored`` states."""

    limit: int
    explored: int

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Verdict:
    equivalent: bool | None
    witness: str | None = None
    reason: str = ""

    @property
    def unknown(self) -> bool:
        return self.equivalent is None

    def __str__(self):
        if self.equivalent is None:
            return f"unknown: {self.reason}" if self.reason else "unknown"
        if self.equivalent:
            return "equivalent"
        return f"inequivalent: {self.witness}"


class Outcome(Enum):
    ACCEPT = "accept"
    REJECT = "reject"

    def __str__(self):
        return self.value

    def __bool__(self):
        return self is Outcome.ACCEPT


Accept = Outcome.ACCEPT
Reject = Outcome.REJECT
