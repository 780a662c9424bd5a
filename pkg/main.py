import logging
import sys

from src.config import Config
from src.cli import main

# Logging configuration
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    stream=sys.stderr,
)

if __name__ == "__main__":
    sys.exit(main())
