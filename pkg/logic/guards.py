import logging
import os
from dataclasses import asdict, dataclass, fields
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv

from logic.errors import GuardExceeded

# Chargement des variables d'environnement
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = "FOSUCCINCT_"

# Au-delà de h=2, |w_h| est astronomique: pas de mise à l'échelle possible
TOWER_MAX_H = 2


@dataclass
class GuardConfig:
    scale: float = float(os.getenv("FOSUCCINCT_GUARD_SCALE", "1"))
    mso_set_domain: int = int(os.getenv("FOSUCCINCT_MSO_SET_DOMAIN", "24"))
    mso_search_budget: int = int(os.getenv("FOSUCCINCT_MSO_SEARCH_BUDGET", "200000"))
    stabilization_limit: int = int(
        os.getenv("FOSUCCINCT_STABILIZATION_LIMIT", "4096")
    )
    separator_pairs: int = int(os.getenv("FOSUCCINCT_SEPARATOR_PAIRS", "200000"))
    separator_candidates: int = int(
        os.getenv("FOSUCCINCT_SEPARATOR_CANDIDATES", "2000000")
    )
    est_label_budget: int = int(os.getenv("FOSUCCINCT_EST_LABEL_BUDGET", "20000"))
    enumerator_max_size: int = int(os.getenv("FOSUCCINCT_ENUMERATOR_MAX_SIZE", "9"))
    lemma3_max_depth: int = int(os.getenv("FOSUCCINCT_LEMMA3_MAX_DEPTH", "2"))
    lemma3_max_n: int = int(os.getenv("FOSUCCINCT_LEMMA3_MAX_N", "6"))
    dense_cell_limit: int = int(os.getenv("FOSUCCINCT_DENSE_CELL_LIMIT", str(2**27)))
    dnf_term_limit: int = int(os.getenv("FOSUCCINCT_DNF_TERM_LIMIT", "64"))

    @classmethod
    def from_env(cls) -> "GuardConfig":
        """Relit l'environnement (utile après modification de os.environ)"""
        return cls._from_mapping(os.environ)

    @classmethod
    def from_file(cls, path: str) -> "GuardConfig":
        """Charge un fichier de configuration au format .env"""
        values = {k: v for k, v in dotenv_values(path).items() if v is not None}
        merged = dict(os.environ)
        merged.update(values)
        logger.info(f"Configuration des gardes chargée depuis {path}")
        return cls._from_mapping(merged)

    @classmethod
    def _from_mapping(cls, env) -> "GuardConfig":
        params = {}
        for f in fields(cls):
            raw = env.get(ENV_PREFIX + f.name.upper())
            if f.name == "scale":
                raw = env.get(ENV_PREFIX + "GUARD_SCALE", raw)
            if raw is None:
                continue
            params[f.name] = float(raw) if f.name == "scale" else int(raw)
        return cls(**params)

    def with_scale(self, scale: Optional[float]) -> "GuardConfig":
        if scale is None:
            return self
        values = asdict(self)
        values["scale"] = float(scale)
        return GuardConfig(**values)

    def limit(self, name: str) -> int:
        """Retourne la garde mise à l'échelle"""
        return int(getattr(self, name) * self.scale)

    def check(self, name: str, requested: int) -> None:
        limit = self.limit(name)
        if requested > limit:
            logger.warning(f"Garde {name} dépassée: {requested} > {limit}")
            raise GuardExceeded(name, requested, limit)

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


DEFAULT_GUARDS = GuardConfig()
