"data transforms"
from typing import Any, Iterable, Mapping
import hashlib
import json
import math
import numpy as np


def batch_it(it: Iterable, n: int) -> Iterable:
    """Batch the output of an iterable (for example: a frequency array)
        i.e. returning another iterator which yields batches

    params:
        - it: an iterable
        - n: batch size integer >= 1

    yields:
        list of the iterable's output, of at most size n

    >>> list(batch_it(range(4), n=3))
    [[0, 1, 2], [3]]
    >>> [len(b) for b in batch_it(np.logspace(-1, 1, 5), 2)]
    [2, 2, 1]
    """
    if n < 1:
        raise ValueError(f"batch size must be >= 1, got {n}")
    batch = []
    for x in it:
        batch.append(x)
        if len(batch) >= n:
            yield batch
            batch = []
    if len(batch) > 0:
        yield batch


def to_plain(data: Any) -> Any:
    """
    converts records (namedtuples, numpy scalars and arrays, complex numbers)
    into plain python containers that yaml and json can serialize
    >>> from typing import NamedTuple
    >>> class Peak(NamedTuple):
    ...     peak: float
    ...     omega: float
    >>> to_plain({"hinf": Peak(np.float64(1.0), 0.0), "ws": np.array([1, 2])})
    {'hinf': {'peak': 1.0, 'omega': 0.0}, 'ws': [1, 2]}
    >>> to_plain(1 + 2j)
    {'re': 1.0, 'im': 2.0}
    """
    if hasattr(data, "_asdict"):
        return {key: to_plain(value) for key, value in data._asdict().items()}
    if isinstance(data, Mapping):
        return {str(key): to_plain(value) for key, value in data.items()}
    if isinstance(data, np.ndarray):
        return [to_plain(value) for value in data.tolist()]
    if isinstance(data, (list, tuple)):
        return [to_plain(value) for value in data]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        return float(data)
    if isinstance(data, (complex, np.complexfloating)):
        return {"re": float(data.real), "im": float(data.imag)}
    return data


def json_to_string(data: Any, sort_keys: bool = False) -> str:
    """returns json-serialized object (string), optionally with sorted keys
    which makes the output canonical for hashing
    >>> json_to_string({"x": 1})
    '{"x": 1}'
    >>> json_to_string({"h": 1.0, "K": {"num": [4, 1]}}, sort_keys=True)
    '{"K": {"num": [4, 1]}, "h": 1.0}'
    """
    return json.dumps(data, ensure_ascii=False, sort_keys=sort_keys)


def string_to_bytes(string: str) -> bytes:
    """returns the utf-8 encoded string as bytes
    >>> string_to_bytes('h: 1.0')
    b'h: 1.0'
    """
    return string.encode("utf-8")


def string_to_sha256_hash(string: str) -> str:
    """Returns the sha256 hash of the utf-8 encoded string as a hex-numerical string
    >>> string_to_sha256_hash("Hello, world!")
    '315f5bdb76d078c43b8ac0064e4a0164612b1fce77c869345bfc94c75894edd3'
    """
    return hashlib.sha256(string_to_bytes(string)).hexdigest()


def log_decades(lo: float, hi: float) -> list[tuple[float, float]]:
    """
    splits [lo, hi] into consecutive intervals no longer than one decade,
    used to give adaptive quadrature one interval per decade
    >>> log_decades(1e-3, 5e-1)
    [(0.001, 0.01), (0.01, 0.1), (0.1, 0.5)]
    """
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got {lo}, {hi}")
    edges = [lo]
    k = math.floor(math.log10(lo) + 1e-12) + 1
    while 10.0 ** k < hi * (1 - 1e-12):
        edges.append(10.0 ** k)
        k += 1
    edges.append(hi)
    return list(zip(edges[:-1], edges[1:]))
