import logging
from typing import Optional

import numpy as np
import pandas as pd
import plotly.graph_objects as go

logger = logging.getLogger(__name__)


class SuccinctnessVisualization:
    """Classe gérant les graphiques des tables de tailles"""

    def __init__(self):
        self.colors = {"entree": "#0d6efd", "sortie": "#dc3545", "borne": "#198754"}

    def _validate_dataframe(self, df: pd.DataFrame, required_columns: list) -> bool:
        """Valide si le DataFrame contient les colonnes requises"""
        missing_columns = [col for col in required_columns if col not in df.columns]
        if missing_columns:
            logger.error(f"Colonnes manquantes: {missing_columns}")
            logger.error(f"Colonnes disponibles: {df.columns.tolist()}")
            return False
        return True

    def create_figure(self, experiment: str, df: pd.DataFrame) -> Optional[go.Figure]:
        if experiment == "thm5":
            return self.create_translation_scatter(df)
        if experiment == "thm8":
            return self.create_phi_m_gap(df)
        if experiment == "thm9":
            return self.create_tower_sizes(df)
        logger.error(f"Pas de graphique pour l'expérience {experiment}")
        return None

    def create_translation_scatter(self, df: pd.DataFrame) -> Optional[go.Figure]:
        """Taille de sortie des traducteurs en fonction de la taille d'entrée"""
        try:
            if not self._validate_dataframe(
                df, ["traducteur", "formule", "taille_entree", "taille_sortie"]
            ):
                return None

            fig = go.Figure()
            for name in df["traducteur"].unique():
                data = df[df["traducteur"] == name]
                fig.add_trace(
                    go.Scatter(
                        x=data["taille_entree"],
                        y=data["taille_sortie"],
                        name=name,
                        mode="markers",
                        text=data["formule"],
                        hovertemplate=(
                            "|entrée|: %{x}<br>"
                            + "|sortie|: %{y}<br>"
                            + "%{text}<extra></extra>"
                        ),
                    )
                )

            # Référence polynomiale C·m^4
            fo3 = df[df["traducteur"] == "fo3-to-fo2"]
            if not fo3.empty:
                C = (fo3["taille_sortie"] / fo3["taille_entree"] ** 4).max()
                m = np.arange(1, df["taille_entree"].max() + 1)
                fig.add_trace(
                    go.Scatter(
                        x=m,
                        y=C * m**4,
                        name=f"{C:.4f}·m⁴",
                        mode="lines",
                        line=dict(dash="dash", color=self.colors["borne"]),
                    )
                )

            fig.update_layout(
                title="Taille des traductions vers FO²",
                xaxis_title="taille de la phrase source",
                yaxis_title="taille de la traduction",
                yaxis_type="log",
                template="plotly_white",
            )
            return fig

        except Exception as e:
            logger.error(f"Erreur lors de la création du nuage des traductions: {e}")
            return None

    def create_phi_m_gap(self, df: pd.DataFrame) -> Optional[go.Figure]:
        """|φ_m| (linéaire) face à la borne FO³ certifiée (exponentielle)"""
        try:
            if not self._validate_dataframe(df, ["m", "taille_phi_m", "borne_fo3"]):
                return None

            fig = go.Figure()
            fig.add_trace(
                go.Scatter(
                    x=df["m"],
                    y=df["taille_phi_m"],
                    name="|φ_m| (FO⁴)",
                    mode="lines+markers",
                    line=dict(color=self.colors["entree"]),
                )
            )
            fig.add_trace(
                go.Scatter(
                    x=df["m"],
                    y=df["borne_fo3"],
                    name="borne FO³ ½·2^(m/2)",
                    mode="lines+markers",
                    line=dict(color=self.colors["borne"], dash="dash"),
                )
            )
            fig.update_layout(
                title="Écart de concision FO⁴ / FO³",
                xaxis_title="m",
                yaxis_title="taille",
                yaxis_type="log",
                template="plotly_white",
            )
            return fig

        except Exception as e:
            logger.error(f"Erreur lors de la création du graphique φ_m: {e}")
            return None

    def create_tower_sizes(self, df: pd.DataFrame) -> Optional[go.Figure]:
        try:
            columns = ["taille_vh_plus", "taille_Phi", "taille_Psi"]
            if not self._validate_dataframe(df, ["h"] + columns):
                return None

            fig = go.Figure()
            for column in columns:
                fig.add_trace(
                    go.Scatter(x=df["h"], y=df[column], name=column, mode="lines+markers")
                )
            fig.update_layout(
                title="Taille des phrases de la construction en tour",
                xaxis_title="h",
                yaxis_title="taille",
                template="plotly_white",
            )
            return fig

        except Exception as e:
            logger.error(f"Erreur lors de la création du graphique des tours: {e}")
            return None
