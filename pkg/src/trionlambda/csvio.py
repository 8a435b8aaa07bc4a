"""Self-describing CSV output and the matching reader.

Layout: header lines starting with ``#`` (``# key: value``), one column-name
line, then data rows. Reals use 17 significant digits, ``,`` separator and LF
line endings so identical runs give byte-identical files.
"""
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import PRESET_METADATA, RunConfig

UNITS_NOTE = (
    "rates, Rabi frequencies, detunings and spectral frequencies in linear GHz "
    "(internal rad/ns = 2*pi*GHz); intensities in photons/ns; delays in ns"
)


def fmt_real(x):
    return format(float(x), ".17g")


@dataclass
class CsvOutput:
    command: str
    config: RunConfig
    columns: list
    data: np.ndarray
    meta: dict = field(default_factory=dict)


def render_csv(command, config, columns, rows, meta=None):
    buf = io.StringIO(newline="")
    buf.write(f"# tool: trionlambda {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# units: {UNITS_NOTE}\n")
    if config.preset:
        buf.write(f"# preset: {json.dumps(PRESET_METADATA[config.preset], sort_keys=True)}\n")
    for key, value in sorted((meta or {}).items()):
        buf.write(f"# meta.{key}: {json.dumps(value, sort_keys=True)}\n")
    buf.write(f"# config: {config.to_json()}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt_real(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, command, config, columns, rows, meta=None):
    text = render_csv(command, config, columns, rows, meta)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text


def parse_csv(text):
    header = {}
    meta = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].strip().partition(": ")
        if key.startswith("meta."):
            meta[key[5:]] = json.loads(value)
        else:
            header[key] = value
        i += 1
    columns = lines[i].split(",")
    body = [ln for ln in lines[i + 1:] if ln]
    data = np.array([[float(v) for v in ln.split(",")] for ln in body], dtype=np.float64)
    data = data.reshape(len(body), len(columns))
    return CsvOutput(header["command"], RunConfig.from_json(header["config"]), columns, data, meta)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())
