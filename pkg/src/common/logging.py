from loguru import logger
import os
import sys

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
logger.remove()
# stdout carries report streams, so logs go to stderr
logger.add(sys.stderr, level=LOG_LEVEL, format="{time:HH:mm:ss} | {level: <7} | {name}:{line} - {message}")

__all__ = ["logger"]
