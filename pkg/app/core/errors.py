"""
Exception hierarchy for lcbandit.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Iterable, Sequence, Tuple


class LCBanditError(Exception):
    """Base class for all expected failures."""

    exit_code = 1


class ConfigError(LCBanditError):
    """Invalid experiment, run or policy configuration."""

    exit_code = 2


class DataError(LCBanditError):
    """Invalid trace or result data."""

    exit_code = 3


class TraceParseError(DataError):
    """A trace file row could not be parsed."""

    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {reason}")


class TraceDomainError(DataError):
    """A trace value violates a domain invariant (range, ordering)."""

    def __init__(self, message: str, path: str = "<memory>", line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class TraceMismatchError(DataError):
    """Traces handed to the simulator do not form a valid arm set."""


class CurveDomainError(DataError):
    """Learning-curve input contains non-finite values."""


class IncompleteGroupError(DataError):
    """A ranking cell lacks results for some policies."""

    def __init__(self, missing: Iterable[Tuple[str, float, int, str]]):
        self.missing: Sequence[Tuple[str, float, int, str]] = sorted(missing)
        shown = ", ".join(
            f"(dataset={d}, budget={b:g}, seed={s}, policy={p})" for d, b, s, p in self.missing[:10]
        )
        more = f" and {len(self.missing) - 10} more" if len(self.missing) > 10 else ""
        super().__init__(f"incomplete ranking groups, missing {shown}{more}")


class PartialFailureError(LCBanditError):
    """Some experiment cells failed; completed cells were kept."""

    exit_code = 4

    def __init__(self, failed: Sequence[str]):
        self.failed = list(failed)
        super().__init__(f"{len(self.failed)} experiment cell(s) failed: {', '.join(self.failed[:5])}")


class ReportWriteError(LCBanditError):
    """An output file could not be written."""
