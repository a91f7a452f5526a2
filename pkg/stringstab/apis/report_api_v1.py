"report and csv output api"

import logging
import os
import tempfile
from pathlib import Path
from typing import Any
import pandas as pd
from yaml import safe_dump
from stringstab import __version__
from stringstab.transforms.functions import to_plain, json_to_string
from stringstab.apis.analysis_api_v1_types import GainReport
from stringstab.apis.simkit_api_v1_types import SimTrace

API_VERSION = 1
API_NAME = "REPORT"

FLOAT_FORMAT = "%.17g"


def provenance_line(digest: str) -> str:
    """
    comment line heading every csv
    >>> provenance_line("abc")[:13]
    '# stringstab '
    """
    return f"# stringstab {__version__} config_sha256={digest}\n"


def csv_text(frame: pd.DataFrame, digest: str) -> str:
    """
    provenance comment, header row, then rows with 17 significant digits and LF line endings
    >>> csv_text(pd.DataFrame({"N": [8], "gain": [0.1]}), "abc").splitlines()[1:]
    ['N,gain', '8,0.10000000000000001']
    """
    return provenance_line(digest) + frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_atomic(path: str | Path, text: str) -> Path:
    """writes text to a temporary file next to path, then renames it into place"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=f".{path.name}.", delete=False, encoding="utf-8", newline=""
    ) as handle:
        handle.write(text)
        temporary = handle.name
    os.replace(temporary, path)
    logging.info(f"wrote {path}")
    return path


def write_csv(path: str | Path, frame: pd.DataFrame, digest: str) -> Path:
    """atomic csv with the provenance line"""
    return write_atomic(path, csv_text(frame, digest))


def report_text(data: Any, as_json: bool = False) -> str:
    """
    yaml (default) or json rendering of a report record
    >>> report_text({"h_min": 0.5, "warnings": []})
    'h_min: 0.5\\nwarnings: []\\n'
    >>> report_text({"h_min": 0.5}, as_json=True)
    '{"h_min": 0.5}\\n'
    """
    plain = to_plain(data)
    if as_json:
        return json_to_string(plain) + "\n"
    return safe_dump(plain, sort_keys=False)


def write_report(path: str | Path, data: Any, as_json: bool = False) -> Path:
    """atomic yaml or json report"""
    return write_atomic(path, report_text(data, as_json))


def trace_to_frame(trace: SimTrace) -> pd.DataFrame:
    """columns t then the signal names"""
    return pd.DataFrame({"t": trace.t} | trace.signals)


def gain_report_frame(report: GainReport) -> pd.DataFrame:
    """
    one row per chain length, with the per sqrt(N) ratio of the def1 gain
    >>> from stringstab.apis.analysis_api_v1_types import NGain
    >>> frame = gain_report_frame(GainReport({16: NGain(1.0, 0.5, 0.1)}, "other", 1.0, True))
    >>> frame.columns.tolist(), frame["def1_per_sqrtN"].tolist()
    (['N', 'def1_gain', 'def2_gain', 'peak_omega', 'def1_per_sqrtN'], [0.25])
    """
    rows = [
        {
            "N": N,
            "def1_gain": gain.def1_gain,
            "def2_gain": gain.def2_gain,
            "peak_omega": gain.peak_omega,
            "def1_per_sqrtN": gain.def1_gain / N**0.5,
        }
        for N, gain in sorted(report.per_N.items())
    ]
    return pd.DataFrame(rows, columns=["N", "def1_gain", "def2_gain", "peak_omega", "def1_per_sqrtN"])
