"""Per-sector data density of grayscale images."""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BadGrid, ParseError

_WS = b" \t\r\n\v\f"


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    maxval: int
    pixels: np.ndarray   # (height, width), row-major

    @classmethod
    def from_array(cls, arr, maxval=None):
        a = np.asarray(arr)
        if a.ndim != 2 or a.size == 0:
            raise BadGrid("image must be a non-empty 2-D array")
        mv = int(np.max(np.abs(a))) if maxval is None else int(maxval)
        return cls(a.shape[1], a.shape[0], mv, a)


class _Header:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip(self):
        d = self.data
        while self.pos < len(d):
            ch = d[self.pos:self.pos + 1]
            if ch in (b"#",):
                nl = d.find(b"\n", self.pos)
                self.pos = len(d) if nl < 0 else nl + 1
            elif ch and ch in _WS:
                self.pos += 1
            else:
                break

    def token(self, what):
        self.skip()
        start = self.pos
        d = self.data
        while self.pos < len(d) and d[self.pos:self.pos + 1] not in _WS and d[self.pos:self.pos + 1] != b"#":
            self.pos += 1
        if start == self.pos:
            raise ParseError(f"missing {what}", start)
        return d[start:self.pos], start

    def integer(self, what, lo, hi):
        tok, off = self.token(what)
        if not re.fullmatch(rb"[0-9]+", tok):
            raise ParseError(f"bad {what} {tok[:16]!r}", off)
        v = int(tok)
        if not lo <= v <= hi:
            raise ParseError(f"{what} {v} outside [{lo}, {hi}]", off)
        return v


def load_pgm(data: bytes) -> GrayImage:
    """Parse a P2 (ASCII) or P5 (binary) PGM stream.

    16-bit P5 samples (maxval > 255) are big-endian.  Errors carry the byte
    offset of the offending token.
    """
    if isinstance(data, str):
        data = data.encode("ascii")
    h = _Header(bytes(data))
    magic, off = h.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"unsupported format {magic[:8]!r} (only P2/P5 grayscale)", off)
    width = h.integer("width", 1, 1 << 31)
    height = h.integer("height", 1, 1 << 31)
    maxval = h.integer("maxval", 1, 65535)
    count = width * height
    if magic == b"P2":
        vals = []
        for _ in range(count):
            vals.append(h.integer("sample", 0, maxval))
        pix = np.asarray(vals, dtype=np.int64 if maxval > 255 else np.int32)
    else:
        if h.pos >= len(h.data) or h.data[h.pos:h.pos + 1] not in _WS:
            raise ParseError("expected one whitespace byte after maxval", h.pos)
        start = h.pos + 1
        width_b = 2 if maxval > 255 else 1
        need = count * width_b
        raw = h.data[start:start + need]
        if len(raw) < need:
            raise ParseError(f"truncated raster: need {need} bytes, got {len(raw)}", start + len(raw))
        pix = np.frombuffer(raw, dtype=">u2" if width_b == 2 else np.uint8).astype(np.int64)
        bad = np.flatnonzero(pix > maxval)
        if bad.size:
            raise ParseError(f"sample {int(pix[bad[0]])} exceeds maxval {maxval}", start + int(bad[0]) * width_b)
    return GrayImage(width, height, maxval, pix.reshape(height, width))


def to_pgm(img: GrayImage, binary=True) -> bytes:
    pix = np.asarray(img.pixels, dtype=np.int64)
    head = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{img.maxval}\n".encode()
    if binary:
        return head + pix.astype(">u2" if img.maxval > 255 else np.uint8).tobytes()
    lines = "\n".join(" ".join(str(int(v)) for v in row) for row in pix)
    return head + lines.encode() + b"\n"


@dataclass(frozen=True)
class DensityGrid:
    n_s: int
    rho: np.ndarray            # (n_s, n_s), NaN where undefined
    row_sizes: np.ndarray
    col_sizes: np.ndarray

    @property
    def defined(self):
        return ~np.isnan(self.rho)

    @property
    def undefined_count(self):
        return int(np.count_nonzero(~self.defined))

    @property
    def mean_rho(self):
        d = self.rho[self.defined]
        return float(np.mean(d)) if d.size else float("nan")

    @property
    def sector_dims(self):
        return [(int(r), int(c)) for r in self.row_sizes for c in self.col_sizes]

    def to_csv(self, header=""):
        buf = io.StringIO()
        buf.write(header)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "rho"])
        for i in range(self.n_s):
            for j in range(self.n_s):
                v = self.rho[i, j]
                w.writerow([i, j, "undefined" if math.isnan(v) else repr(float(v))])
        return buf.getvalue()


def partition(length, parts):
    """Boundaries of the near-equal split: the first ``length % parts`` pieces are one longer."""
    q, rem = divmod(length, parts)
    sizes = np.full(parts, q, dtype=np.int64)
    sizes[:rem] += 1
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def sector_density(img: GrayImage, n_s: int) -> DensityGrid:
    if not 1 <= n_s <= min(img.width, img.height):
        raise BadGrid(f"n_s must lie in [1, {min(img.width, img.height)}], got {n_s}")
    rb = partition(img.height, n_s)
    cb = partition(img.width, n_s)
    ss, mx = kernels.sector_stats(np.asarray(img.pixels, dtype=np.float64), rb, cb)
    rs, cs = np.diff(rb), np.diff(cb)
    P = rs[:, None] * cs[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(mx > 0, ss / (P * mx * mx), np.nan)
    return DensityGrid(n_s, rho, rs, cs)


def density_scaling_curve(img: GrayImage, n_s_list):
    """Mean sector density against sector size, with 1/ln x and 1/sqrt x comparison curves.

    Both comparison curves pass through the first point, which is the
    largest sector size because ``n_s_list`` is ascending.
    """
    ns = [int(x) for x in n_s_list]
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise BadGrid("n_s_list must be strictly ascending")
    rows, undefined = [], 0
    for n_s in ns:
        g = sector_density(img, n_s)
        undefined += g.undefined_count
        rows.append({"n_s": n_s, "sector_size": img.width * img.height / n_s ** 2, "mean_rho": g.mean_rho})
    x0, r0 = rows[0]["sector_size"], rows[0]["mean_rho"]
    a = r0 * math.log(x0) if x0 > 1 else float("nan")
    b = r0 * math.sqrt(x0)
    for r in rows:
        x = r["sector_size"]
        r["c_log"] = a / math.log(x) if x > 1 else float("nan")
        r["c_sqrt"] = b / math.sqrt(x)
    meta = {"n_s_list": ns, "undefined_sector_count": undefined,
            "fit_anchors": {"sector_size": x0, "a_log": a, "b_sqrt": b, "anchor": "largest sector size"}}
    return rows, meta


def curve_csv(rows, header=""):
    buf = io.StringIO()
    buf.write(header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sector_size", "mean_rho", "c_log", "c_sqrt"])
    for r in rows:
        w.writerow([repr(float(r[k])) for k in ("sector_size", "mean_rho", "c_log", "c_sqrt")])
    return buf.getvalue()


def curve_meta_json(meta):
    return json.dumps(meta, indent=1, sort_keys=True)
