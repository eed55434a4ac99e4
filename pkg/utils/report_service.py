import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit

from certificates.separators import minimal_separator, weight
from families.linear import gen_phi_m
from families.tower import build_vh_wh, ell
from families.tower_formulas import gen_Phi, gen_Psi, gen_vh_plus
from families.translators import translate_fo3_to_fo2, translate_fo_to_fo2
from logic.enumerator import corpus_sentences
from logic.errors import GuardExceeded
from logic.evaluator import eval_fo
from logic.formula import quantifier_depth, size
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import Interpretation, LinearOrder
from view.succinctness_view import SuccinctnessVisualization

logger = logging.getLogger(__name__)

EXPERIMENTS = ("thm5", "thm8", "thm9")


class ReportService:
    """Tables de tailles mesurées pour les expériences de concision"""

    def __init__(self, guards: GuardConfig = DEFAULT_GUARDS):
        self.guards = guards
        self.visualizer = SuccinctnessVisualization()

    def process_request(
        self,
        experiment: str,
        corpus_size: int = 30,
        corpus_max_size: int = 12,
        seed: int = 0,
        m_max: int = 12,
        h_max: int = 6,
        plot_path: Optional[str] = None,
    ) -> Tuple[pd.DataFrame, str]:
        """Construit la table d'une expérience et le résumé des ajustements"""
        if experiment == "thm5":
            df, message = self._translator_sizes(corpus_size, corpus_max_size, seed)
        elif experiment == "thm8":
            df, message = self._phi_m_gap(m_max)
        elif experiment == "thm9":
            df, message = self._tower_sizes(h_max)
        else:
            return pd.DataFrame(), f"Erreur: expérience inconnue '{experiment}'"

        if plot_path and not df.empty:
            figure = self.visualizer.create_figure(experiment, df)
            if figure is not None:
                figure.write_html(plot_path)
                logger.info(f"Graphique écrit dans {plot_path}")
        return df, message

    # ------------------------------------------------------------ traducteurs

    def _translator_sizes(
        self, corpus_size: int, corpus_max_size: int, seed: int
    ) -> Tuple[pd.DataFrame, str]:
        """Taille des traductions FO³→FO² (corpus) et FO→FO² (corpus et φ_m)"""
        rows: List[Dict[str, object]] = []
        corpus = corpus_sentences(corpus_size, corpus_max_size, seed=seed, max_depth=3)
        for psi in corpus:
            translation = translate_fo3_to_fo2(psi, self.guards)
            rows.append(self._translation_row("fo3-to-fo2", translation))
        sources = list(corpus) + [gen_phi_m(m) for m in range(2)]
        for phi in sources:
            try:
                translation = translate_fo_to_fo2(phi, self.guards)
            except GuardExceeded as e:
                logger.warning(f"Traduction FO→FO² abandonnée pour |φ|={size(phi)}: {e}")
                continue
            rows.append(self._translation_row("fo-to-fo2", translation))
        df = pd.DataFrame(rows)
        if df.empty:
            return df, "Aucune traduction produite"

        fo3 = df[df["traducteur"] == "fo3-to-fo2"]
        fo = df[df["traducteur"] == "fo-to-fo2"]
        C = float((fo3["taille_sortie"] / fo3["taille_entree"] ** 4).max())
        c = float((np.log2(fo["taille_sortie"]) / fo["taille_entree"]).max())
        message = (
            f"FO³→FO²: |sortie| <= C·|ψ|^4 avec C = {C:.6f}\n"
            f"FO→FO²: log2|sortie| <= c·|φ| avec c = {c:.6f}"
        )
        logger.info(message.replace("\n", "; "))
        return df, message

    @staticmethod
    def _translation_row(name: str, translation) -> Dict[str, object]:
        return {
            "traducteur": name,
            "formule": str(translation.source),
            "taille_entree": translation.source_size,
            "profondeur": quantifier_depth(translation.source),
            "seuil_D": translation.stabilization.D,
            "taille_sortie": translation.output_size,
        }

    # ------------------------------------------------------------ φ_m

    def _phi_m_gap(self, m_max: int, checked_m: int = 3) -> Tuple[pd.DataFrame, str]:
        """|φ_m| face à la borne FO³ certifiée ½·2^{m/2}"""
        rows = []
        for m in range(1, m_max + 1):
            phi = gen_phi_m(m)
            N = 2**m
            A = [Interpretation(LinearOrder(N))]
            B = [Interpretation(LinearOrder(N + 1))]
            delta = minimal_separator(A, B, self.guards)
            w = weight(delta)
            verified: Optional[bool] = None
            if m <= checked_m:
                verified = eval_fo(phi, LinearOrder(N), guards=self.guards) and not eval_fo(
                    phi, LinearOrder(N + 1), guards=self.guards
                )
            rows.append(
                {
                    "m": m,
                    "taille_phi_m": size(phi),
                    "profondeur_phi_m": quantifier_depth(phi),
                    "poids_carre": w.squared,
                    "borne_fo3": round(w.value / 2, 6),
                    "phi_m_verifie": verified,
                }
            )
        df = pd.DataFrame(rows)
        slope, intercept = np.polyfit(df["m"], df["taille_phi_m"], 1)
        growth, _ = curve_fit(lambda m, a: a * m / 2 - 1, df["m"], np.log2(df["borne_fo3"]))
        message = (
            f"|φ_m| = {slope:.1f}·m + {intercept:.1f}; "
            f"log2(borne FO³) ≈ {growth[0]:.3f}·m/2 - 1"
        )
        logger.info(message)
        return df, message

    # ------------------------------------------------------------ tour

    def _tower_sizes(self, h_max: int) -> Tuple[pd.DataFrame, str]:
        """Tailles de v_h, w_h et des phrases (v_h)+, Φ_h, Ψ_h"""
        rows = []
        for h in range(1, h_max + 1):
            row: Dict[str, object] = {"h": h}
            try:
                strings = build_vh_wh(h)
                row.update({"longueur_v": len(strings.v), "longueur_w": len(strings.w), "ell": ell(h)})
            except GuardExceeded:
                row.update({"longueur_v": None, "longueur_w": None, "ell": None})
            row.update(
                {
                    "taille_vh_plus": size(gen_vh_plus(h)),
                    "taille_Phi": size(gen_Phi(h)),
                    "taille_Psi": size(gen_Psi(h)),
                }
            )
            rows.append(row)
        df = pd.DataFrame(rows)
        fits = []
        for column in ("taille_vh_plus", "taille_Phi", "taille_Psi"):
            (a, b), _ = curve_fit(lambda h, a, b: a * h**2 + b, df["h"], df[column].astype(float))
            fits.append(f"{column} ≈ {a:.1f}·h² + {b:.1f}")
        message = "; ".join(fits)
        logger.info(message)
        return df, message
