"""
Utils for working with filepaths.
"""
import logging
from pathlib import Path

from .errors import IoError

logger = logging.getLogger(__name__)


def validate_filepath(filepath):
    """
    :param filepath: (pathlib.Path or str) file expected to exist
    :returns: pathlib.Path
    """
    filepath = Path(filepath)
    if not filepath.exists():
        raise IoError(f'file not found: {filepath}')
    if not filepath.is_file():
        raise IoError(f'not a file: {filepath}')
    return filepath


def prepare_output_path(filepath):
    """
    Creates the parent directory of an output file if needed.

    :returns: pathlib.Path
    """
    filepath = Path(filepath)
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f'cannot create directory {filepath.parent}: {e}')
    return filepath
