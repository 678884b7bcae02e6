import logging
import os
import sys

# Environment variable controlling diagnostics on standard error
LOG_ENV_VAR = 'HELMHOLTZ_CIP_LOG'

_LEVELS = {'error': logging.ERROR,
           'info': logging.INFO,
           'debug': logging.DEBUG}


def configure_logging(default='info', stream=None):
    """Attach a single stderr handler to the package logger.

    The level is read from HELMHOLTZ_CIP_LOG (error, info or debug). Unknown values fall back to the default.

    :param default: Level name used when the environment variable is unset, defaults to 'info'
    :type default: str, optional
    :param stream: Stream for the handler, defaults to sys.stderr
    :type stream: file-like, optional
    :return: The configured package logger
    :rtype: logging.Logger
    """
    level_name = os.environ.get(LOG_ENV_VAR, default).strip().lower()
    level = _LEVELS.get(level_name, _LEVELS[default])

    logger = logging.getLogger('cip4helm')
    logger.setLevel(level)

    # Re-configuration replaces the handler instead of stacking them
    for handler in list(logger.handlers):
        if getattr(handler, '_cip4helm', False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    handler._cip4helm = True
    logger.addHandler(handler)
    logger.propagate = False
    return logger


def banner(logger, title):
    """Progress banner in the style used by the processing scripts"""
    logger.info("################ %s: ################", title)
