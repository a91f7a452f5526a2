"Datatypes used by demos api"

from typing import NamedTuple
import pandas as pd


class DemoResult(NamedTuple):
    """Outcome of one packaged demonstration"""
    theorem: int
    passed: bool
    """Whether the demonstrated property held on every draw"""
    frame: pd.DataFrame
    """Plot-ready table written as csv"""
    summary: str
    """One line description of the verdict"""
