# File handling operations for SigShape
import configparser
import csv
import io
import json
import logging
import os
import sys
from typing import Any, Dict, List, Tuple

from sigshape.core.errors import DataError, UsageError

# Get logger for this module
logger = logging.getLogger('SigShape.file_handler')

STDIO = '-'


class FileHandler:
    """Handles all file reading and writing for the application.

    Every OSError is turned into a DataError naming the path, so callers
    only deal with the package's exception hierarchy. The path '-' stands
    for stdout when writing.
    """

    settings_section = 'SETTINGS'

    def read_text(self, path: str) -> str:
        """
        Reads a whole text file.

        Args:
            path (str): File to read

        Returns:
            str: File contents
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise DataError(f"cannot read file: {e.strerror or e}", path) from e
        logger.info(f"Read {len(text)} characters from {path}")
        return text

    def write_text(self, path: str, text: str):
        """
        Writes text to a file, or to stdout when path is '-'.

        Args:
            path (str): Destination
            text (str): Contents
        """
        if path == STDIO:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            directory = os.path.dirname(path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
        except OSError as e:
            raise DataError(f"cannot write file: {e.strerror or e}", path) from e
        logger.info(f"Wrote {path}")

    # --- JSON -----------------------------------------------------------

    def read_json(self, path: str) -> Any:
        text = self.read_text(path)
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise DataError(f"invalid JSON: {e.msg}", path, e.lineno) from e

    def write_json(self, path: str, data: Any):
        """Deterministic JSON: sorted keys, shortest round-trip floats."""
        self.write_text(path, json.dumps(data, indent=2, sort_keys=True) + '\n')

    def metadata_path(self, out_path: str) -> str:
        return f"{out_path}.meta.json"

    def write_metadata(self, out_path: str, metadata: Dict[str, Any]):
        """Writes the sidecar <out>.meta.json next to an output file."""
        if out_path == STDIO:
            logger.info("Output went to stdout - skipping metadata sidecar")
            return
        self.write_json(self.metadata_path(out_path), metadata)

    # --- CSV ------------------------------------------------------------

    def write_csv(self, path: str, rows: List[List[str]]):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerows(rows)
        self.write_text(path, buffer.getvalue())

    def read_csv(self, path: str) -> List[Tuple[int, List[str]]]:
        """Non-empty CSV records paired with their 1-based line numbers."""
        text = self.read_text(path)
        reader = csv.reader(io.StringIO(text))
        records = []
        try:
            for row in reader:
                if row and any(cell.strip() for cell in row):
                    records.append((reader.line_num, [cell.strip() for cell in row]))
        except csv.Error as e:
            raise DataError(f"malformed CSV: {e}", path, reader.line_num) from e
        return records

    # --- settings -------------------------------------------------------

    def read_settings(self, path: str) -> Dict[str, str]:
        """
        Reads a configuration file: JSON object, or INI with a [SETTINGS] section.

        Args:
            path (str): Config file path

        Returns:
            Dict[str, Any]: Raw settings, keys as written in the file
        """
        if path.lower().endswith('.json'):
            data = self.read_json(path)
            if not isinstance(data, dict):
                raise UsageError(f"{path}: config file must hold a JSON object")
            logger.info(f"Settings loaded from {path}")
            return data

        config = configparser.ConfigParser()
        try:
            config.read_string(self.read_text(path), source=path)
        except configparser.Error as e:
            raise UsageError(f"{path}: invalid config file: {e}") from e
        if self.settings_section not in config:
            raise UsageError(f"{path}: missing [{self.settings_section}] section")
        settings = dict(config[self.settings_section])
        logger.info(f"Settings loaded from {path}")
        return settings

    def write_settings(self, path: str, settings: Dict[str, Any]):
        """Writes settings as an INI file with a [SETTINGS] section."""
        config = configparser.ConfigParser()
        config[self.settings_section] = {k: '' if v is None else str(v) for k, v in settings.items()}
        buffer = io.StringIO()
        config.write(buffer)
        self.write_text(path, buffer.getvalue())
        logger.info("Settings saved successfully")
