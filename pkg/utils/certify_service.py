import logging
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from certificates.est import (
    KeypropReport,
    build,
    certify_lower_bound,
    check_keyprop,
    dump_tree,
    tree_size_bound,
)
from logic.errors import InvariantViolation
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import Interpretation, parse_interpretation
from logic.syntax import parse

logger = logging.getLogger(__name__)


class CertifyService:
    """Certificats de borne inférieure et arbres étendus d'une phrase FO³"""

    def __init__(self, guards: GuardConfig = DEFAULT_GUARDS):
        self.guards = guards

    @staticmethod
    def _interpretations(texts: Sequence[str]) -> List[Interpretation]:
        return [parse_interpretation(t) for t in texts]

    def process_request(
        self,
        formula_text: str,
        A_texts: Sequence[str],
        B_texts: Sequence[str],
        with_tree: bool = False,
    ) -> Tuple[pd.DataFrame, str, Optional[str]]:
        """Retourne la table des noeuds vérifiés, le certificat et le dump de l'arbre"""
        psi = parse(formula_text)
        A = self._interpretations(A_texts)
        B = self._interpretations(B_texts)

        certificate = certify_lower_bound(psi, A, B, self.guards)
        lines = [f"{key}: {value}" for key, value in certificate.as_dict().items()]
        if not certificate.verdict:
            raise InvariantViolation(
                f"|ψ| = {certificate.size} < ½·w = {certificate.weight.value / 2:.4f}",
                "\n".join(lines),
            )

        if not with_tree:
            return pd.DataFrame(), "\n".join(lines), None

        tree = build(psi, A, B, self.guards)
        report = check_keyprop(tree, self.guards)
        bound = tree_size_bound(tree, self.guards)
        lines.append(f"nodes: {bound.nodes}")
        lines.append(f"tree_bound: {bound.bound_holds}")
        dump = dump_tree(tree)
        self._raise_on_violation(report, bound.bound_holds, dump)
        lines.append(
            f"keyprop: {len(report.checks)} verified, {len(report.skipped)} skipped, 0 violations"
        )
        df = pd.DataFrame(
            [
                {
                    "chemin": c.path,
                    "etiquette": c.syntax_label,
                    "poids_carre": c.weight.squared if c.weight else None,
                    "verdict": c.verdict,
                }
                for c in report.checks
            ]
        )
        return df, "\n".join(lines), dump

    @staticmethod
    def _raise_on_violation(report: KeypropReport, bound_holds: bool, dump: str):
        if report.ok and bound_holds:
            return
        problems = list(report.violations)
        if not bound_holds:
            problems.append("|T| < ½·w(racine)")
        logger.error(f"Vérification de l'arbre en échec: {problems}")
        raise InvariantViolation("; ".join(problems), dump)
