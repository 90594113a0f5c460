"""Result records shared by the structure checks."""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check; a failure carries a counterexample as element labels."""

    name: str
    passed: bool
    witness: Optional[tuple[str, ...]] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def ok(cls, name: str, detail: str = "") -> "CheckResult":
        return cls(name, True, None, detail)

    @classmethod
    def fail(cls, name: str, witness: Optional[tuple[str, ...]], detail: str) -> "CheckResult":
        return cls(name, False, witness, detail)
