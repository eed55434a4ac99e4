import logging
import sys
import traceback

from app import run

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.FileHandler("app.log", mode="w"),
        logging.StreamHandler(),
    ],
)
logger = logging.getLogger("main")


def main() -> int:
    try:
        logger.info("Démarrage de l'atelier de concision")
        return run(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Processus interrompu par l'utilisateur.")
        return 130
    except Exception as e:
        logger.error(f"Une erreur est survenue: {e}")
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
