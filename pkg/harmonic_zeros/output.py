import csv
import json
import logging
import os
import tempfile
from datetime import datetime, timezone

logger = logging.getLogger(__name__)


class OutputHelper:
    @staticmethod
    def _replace_into(path, write):
        """Write through a temporary sibling file and move it into place"""
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                write(handle)
            os.replace(tmp, path)
            logger.debug("wrote %s", path)
        except Exception:
            logger.debug("rolling back partial write of %s", path)
            if os.path.exists(tmp):
                os.remove(tmp)
            raise
        return path

    @staticmethod
    def write_json(path, document):
        """Write a JSON document, keys sorted, two-space indent"""

        def write(handle):
            json.dump(document, handle, indent=2, sort_keys=True, allow_nan=False)
            handle.write("\n")

        return OutputHelper._replace_into(path, write)

    @staticmethod
    def write_csv(path, header, rows):
        def write(handle):
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([OutputHelper.format_cell(value) for value in row])

        return OutputHelper._replace_into(path, write)

    @staticmethod
    def write_text(path, text):
        return OutputHelper._replace_into(path, lambda handle: handle.write(text))

    @staticmethod
    def format_float(x):
        """Shortest string that parses back to the same float"""
        if x is None:
            return ""
        return repr(float(x))

    @staticmethod
    def format_cell(value):
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return OutputHelper.format_float(value)
        return str(value)

    @staticmethod
    def format_datetime(dt=None):
        """UTC timestamp as ISO 8601 (now when dt is None)"""
        dt = dt or datetime.now(timezone.utc)
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
