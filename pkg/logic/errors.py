"""Exceptions communes du workbench."""

from typing import Any, Optional


class WorkbenchError(Exception):
    """Racine de toutes les erreurs levées par le workbench"""


class FormulaSyntaxError(WorkbenchError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class SignatureError(WorkbenchError, ValueError):
    pass


class UnassignedVariableError(WorkbenchError, ValueError):
    pass


class TypeMismatchError(WorkbenchError, ValueError):
    pass


class WitnessArityError(WorkbenchError, ValueError):
    pass


class PreconditionError(WorkbenchError, ValueError):
    def __init__(self, message: str, interpretation: Optional[Any] = None):
        super().__init__(message)
        self.interpretation = interpretation


class GuardExceeded(WorkbenchError, RuntimeError):
    """Refus explicite d'un calcul au-delà d'une garde d'échelle"""

    def __init__(self, guard: str, requested: int, limit: int):
        super().__init__(
            f"Garde '{guard}' dépassée: {requested} demandé, limite {limit}"
        )
        self.guard = guard
        self.requested = requested
        self.limit = limit


class InvariantViolation(WorkbenchError, RuntimeError):
    """Un invariant interne est faux: c'est un bug d'implémentation"""

    def __init__(self, message: str, dump: Optional[str] = None):
        super().__init__(message)
        self.dump = dump
