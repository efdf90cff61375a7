import sys

from ballbody.infrastructure.adapters.input.cli_adapter import main
from ballbody.utils.config import settings
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

if __name__ == "__main__":
    logger.debug(f"Iniciando toolkit en modo: {settings.ENVIRONMENT}")
    sys.exit(main())
