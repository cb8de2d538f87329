#!/usr/bin/env python3
"""
SigShape - shape analysis of motion capture animations.
Compares clips as curves on SO(3)^d by SRVT and log-signature distances.
"""

import argparse
import logging
import sys

from sigshape.ui.cli import run
from sigshape.utils.colors import error

DEFAULT_LOG_FILE = 'sigshape.log'


def setup_logging(log_file: str = DEFAULT_LOG_FILE):
    """Configure logging for the application."""
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    # Only log to file; stdout carries data and stderr carries status lines
    logging.basicConfig(
        level=logging.INFO,
        format=log_format,
        handlers=[
            logging.FileHandler(log_file)
        ]
    )

    # Set specific loggers to WARNING to reduce noise
    logging.getLogger('numba').setLevel(logging.WARNING)
    logging.getLogger('matplotlib').setLevel(logging.WARNING)


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 8):
        error("Python 3.8 or higher required")
        sys.exit(1)


def _log_file(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--log-file', default=DEFAULT_LOG_FILE)
    known, _ = pre.parse_known_args(argv)
    return known.log_file


def main(argv=None):
    """Main application entry point."""
    argv = sys.argv[1:] if argv is None else argv
    check_python_version()
    setup_logging(_log_file(argv))
    logger = logging.getLogger('SigShape')
    logger.info(f"Starting: {' '.join(argv)}")

    code = run(argv)

    logger.info(f"Finished with exit code {code}")
    sys.exit(code)


if __name__ == "__main__":
    main()
