import logging

import settings

LOGGER = logging.getLogger("bddc")

if not LOGGER.handlers:
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    LOGGER.addHandler(_handler)

LOGGER.setLevel(settings.LOG_LEVEL)
LOGGER.propagate = False
