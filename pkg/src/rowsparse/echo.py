import logging

from colorlog import ColoredFormatter

from rowsparse.core import Base
from rowsparse.config import settings

handler = logging.StreamHandler()
handler.setFormatter(ColoredFormatter(
    settings.LOG_FORMAT,
    log_colors=settings.LOG_COLORS
))


def getLogger(name='', level=None):
    logger = logging.getLogger(name)
    if handler not in logger.handlers:
        logger.addHandler(handler)
        logger.setLevel(settings.LOG_LEVEL)
    if level is not None:
        logger.setLevel(level)
    return logger


class Echo(Base):

    def __init__(self, activated=True):

        self.logger = getLogger(name='rowsparse')
        self.activated = activated

    def debug(self, msg, *args):

        if self.activated:
            self.logger.debug(msg, *args)

    def info(self, msg, *args):

        if self.activated:
            self.logger.info(msg, *args)

    def warn(self, msg, *args):

        if self.activated:
            self.logger.warning(msg, *args)

    def error(self, msg, *args):

        if self.activated:
            self.logger.error(msg, *args)
