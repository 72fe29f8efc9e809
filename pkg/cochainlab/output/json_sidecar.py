import json
import logging
import math
import os
from importlib import metadata

logger = logging.getLogger(__name__)


class JsonSidecarException(Exception):
    pass


def library_version() -> str:
    try:
        return metadata.version("cochainlab")
    except metadata.PackageNotFoundError:
        return "unknown"


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


class JsonSidecar(object):
    """
    The JSON file written next to a CSV: full config, summary, runtime and library version.

    Parameters
    ----------
    path : str
        Destination file.
    """

    def __init__(self, path: str):
        self.path = path

    def __repr__(self):
        return "JsonSidecar(%s)" % self.path

    @classmethod
    def beside(cls, csv_path: str) -> "JsonSidecar":
        root, _ = os.path.splitext(csv_path)
        return cls(root + ".json")

    def write(self, config: dict, summary: dict, runtime: float) -> str:
        """
        Raises
        ------
        JsonSidecarException
            If the payload is not serializable or the file cannot be written.
        """
        payload = {
            "config": config,
            "summary": summary,
            "runtime_seconds": runtime,
            "version": library_version(),
        }
        try:
            text = json.dumps(_clean(payload), indent=2, sort_keys=True)
        except (TypeError, ValueError) as e:
            logger.error("sidecar payload is not serializable: %s", e)
            raise JsonSidecarException(str(e))
        try:
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.path, "w") as f:
                f.write(text + "\n")
        except OSError as e:
            logger.error("cannot write %s: %s", self.path, e)
            raise JsonSidecarException(str(e))
        logger.info("wrote %s", self.path)
        return self.path
