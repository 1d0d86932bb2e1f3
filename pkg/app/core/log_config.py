import logging

from core.config import app_settings

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level: str | None = None) -> None:
    """
    Configure the root logger once for the process.

    Parameters
    ----------
    level : str, optional
        Level name; defaults to ``app_settings.log_level``.
    """
    level_name = (level or app_settings.log_level).upper()
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.WARNING))
