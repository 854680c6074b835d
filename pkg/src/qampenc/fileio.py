"""Vector file formats and the metadata header shared by CLI outputs.

Vector CSV: one entry per line, either ``re`` or ``re,im``; blank lines and
lines starting with ``#`` are ignored.

Vector binary: one line of JSON ``{"n": <count>, "complex": <bool>}``
followed by little-endian float64 values (interleaved re, im if complex).
"""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import ParseError

META_PREFIX = "# meta "


def read_vector_csv(text: str) -> np.ndarray:
    vals = []
    cplx = False
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = [p.strip() for p in s.split(",")]
        try:
            if len(parts) == 1:
                vals.append(complex(float(parts[0]), 0.0))
            elif len(parts) == 2:
                vals.append(complex(float(parts[0]), float(parts[1])))
                cplx = True
            else:
                raise ValueError
        except ValueError:
            raise ParseError(f"line {lineno}: expected 're' or 're,im', got {s[:40]!r}") from None
    if not vals:
        raise ParseError("no values in vector file")
    arr = np.asarray(vals, dtype=np.complex128)
    return arr if cplx and np.any(arr.imag != 0) else arr.real.copy()


def read_vector_binary(data: bytes) -> np.ndarray:
    nl = data.find(b"\n")
    if nl < 0:
        raise ParseError("missing JSON header line", 0)
    try:
        head = json.loads(data[:nl].decode("utf-8"))
        n = int(head["n"])
        cplx = bool(head.get("complex", False))
    except (ValueError, KeyError, TypeError, UnicodeDecodeError):
        raise ParseError("bad JSON header", 0) from None
    body = data[nl + 1:]
    per = 16 if cplx else 8
    if n < 1 or len(body) != n * per:
        raise ParseError(f"expected {n * per} payload bytes, got {len(body)}", nl + 1)
    arr = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return arr[0::2] + 1j * arr[1::2] if cplx else arr


def write_vector_binary(values) -> bytes:
    v = np.asarray(values)
    cplx = bool(np.iscomplexobj(v))
    head = json.dumps({"n": int(v.size), "complex": cplx}).encode() + b"\n"
    if cplx:
        inter = np.empty(2 * v.size, dtype="<f8")
        inter[0::2], inter[1::2] = v.real, v.imag
        return head + inter.tobytes()
    return head + v.astype("<f8").tobytes()


def read_vector(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    first = data.lstrip()[:1]
    if first == b"{":
        return read_vector_binary(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError("vector file is neither CSV text nor a binary vector") from None
    return read_vector_csv(text)


def meta_line(meta: dict) -> str:
    return META_PREFIX + json.dumps(meta, sort_keys=True) + "\n"


def split_output(text: str):
    """Split a CLI output into (meta dict, payload).

    JSON outputs carry ``meta`` as a top-level key; CSV outputs start with a
    ``# meta {...}`` line.  The payload is the parsed JSON object or the CSV
    rows as a list of dicts.
    """
    if text.startswith(META_PREFIX):
        head, _, body = text.partition("\n")
        meta = json.loads(head[len(META_PREFIX):])
        return meta, list(csv.DictReader(io.StringIO(body)))
    obj = json.loads(text)
    return obj.pop("meta"), obj
