import csv
import io
import logging
import os
from datetime import datetime, timezone
from typing import Iterable, List, Sequence

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# generated "


class CsvSinkException(Exception):
    pass


class CsvSink(object):
    """
    Writes experiment records to a CSV file.

    The first line is a ``# generated <timestamp>`` comment; everything after it (the column
    header and the rows) is the body, which is identical across reruns of the same config.

    Parameters
    ----------
    path : str
        Destination file. Parent directories are created on write.

    Methods
    -------
    write(columns, rows)
        Writes the header line, the column names and the rows.
    """

    def __init__(self, path: str):
        self.path = path

    def __repr__(self):
        return "CsvSink(%s)" % self.path

    def write(self, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
        """
        Writes the file.

        Parameters
        ----------
        columns : sequence of str
            Column names, in order.
        rows : iterable of sequences
            One sequence per record, matching ``columns``.

        Returns
        -------
        str
            The path written.

        Raises
        ------
        CsvSinkException
            If a row has the wrong length or the file cannot be written.
        """
        body = render_body(columns, rows)
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        try:
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.path, "w", newline="") as f:
                f.write(HEADER_PREFIX + stamp + "\n")
                f.write(body)
        except OSError as e:
            logger.error("cannot write %s: %s", self.path, e)
            raise CsvSinkException(str(e))
        logger.info("wrote %s", self.path)
        return self.path


def render_body(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise CsvSinkException("Row %r does not match the %d columns" % (row, len(columns)))
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def format_value(value):
    # repr keeps every bit of a float so reruns diff byte-for-byte
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def read_body(path: str) -> List[str]:
    """Lines of a CSV file without the timestamp header."""
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise CsvSinkException(str(e))
    if lines and lines[0].startswith(HEADER_PREFIX):
        lines = lines[1:]
    return lines
