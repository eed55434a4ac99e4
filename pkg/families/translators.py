"""Traduction de phrases FO sur les ordres linéaires vers FO²(<).

La vérité d'une phrase de profondeur d est constante à partir de A_{2^{d+1}};
la traduction décrit explicitement l'ensemble des N où elle est vraie avec
les phrases χ_ℓ et χ_{≥ℓ}.
"""

import logging
from dataclasses import dataclass
from typing import List

from families.linear import gen_chi
from logic.errors import SignatureError
from logic.evaluator import Stabilization, stabilization_threshold
from logic.formula import (
    FO3_VARIABLES,
    Formula,
    disj,
    eq,
    exists,
    neg,
    quantifier_depth,
    size,
    uses_sets,
    variable_names,
)
from logic.guards import DEFAULT_GUARDS, GuardConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Translation:
    source: Formula
    output: Formula
    stabilization: Stabilization

    @property
    def source_size(self) -> int:
        return size(self.source)

    @property
    def output_size(self) -> int:
        return size(self.output)


def _never() -> Formula:
    return neg(exists("x", eq("x", "x")))


def _assemble(parts: List[Formula]) -> Formula:
    return disj(*parts) if parts else _never()


def _check_order_sentence(psi: Formula):
    if uses_sets(psi):
        raise SignatureError("Phrase FO attendue")


def translate_fo3_to_fo2(psi: Formula, guards: GuardConfig = DEFAULT_GUARDS) -> Translation:
    _check_order_sentence(psi)
    extra = variable_names(psi) - set(FO3_VARIABLES)
    if extra:
        raise SignatureError(f"Phrase FO³ attendue, variables en trop: {sorted(extra)}")
    stab = stabilization_threshold(psi, guards)
    parts = [gen_chi(l) for l in range(stab.D + 1) if stab.profile[l]]
    if stab.tail:
        parts.append(gen_chi(stab.D + 1, "at_least"))
    output = _assemble(parts)
    logger.info(
        f"Traduction FO³→FO²: |ψ|={size(psi)}, D={stab.D}, queue={stab.tail}, |sortie|={size(output)}"
    )
    return Translation(psi, output, stab)


def translate_fo_to_fo2(phi: Formula, guards: GuardConfig = DEFAULT_GUARDS) -> Translation:
    _check_order_sentence(phi)
    stab = stabilization_threshold(phi, guards)
    top = 2 ** (quantifier_depth(phi) + 1)
    parts = [gen_chi(l) for l in range(top) if stab.profile[l]]
    if stab.profile[top]:
        parts.append(gen_chi(top, "at_least"))
    output = _assemble(parts)
    logger.info(f"Traduction FO→FO²: |φ|={size(phi)}, coupure={top}, |sortie|={size(output)}")
    return Translation(phi, output, stab)
