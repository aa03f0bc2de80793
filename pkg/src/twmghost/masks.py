"""Object masks: portable graymap ingestion and the built-in three-hole target."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import UnreadableFile, UnsupportedFormat
from .pipeline import ObjectMask

BUILTIN_THREE_HOLES = "three-holes"


def three_holes(width: int = 256, pitch: float = 52e-6, hole_diameter: float = 256e-6,
                spacing: float = 1.2e-3) -> ObjectMask:
    """Copper-sheet style target: three circular holes on an equilateral
    triangle of side `spacing`, centered on the grid."""
    x = (np.arange(width) - width // 2) * pitch
    xx, yy = np.meshgrid(x, x, indexing="ij")
    rad = spacing / np.sqrt(3.0)
    centers = [(rad * np.cos(a), rad * np.sin(a))
               for a in (np.pi / 2, np.pi / 2 + 2 * np.pi / 3, np.pi / 2 + 4 * np.pi / 3)]
    t = np.zeros((width, width))
    for cx, cy in centers:
        t[np.hypot(xx - cx, yy - cy) <= hole_diameter / 2] = 1.0
    return ObjectMask(transmission=t, pitch=pitch)


def _read_pnm_tokens(data: bytes, count: int):
    """First `count` whitespace-separated ASCII tokens, skipping comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        m = re.match(rb"\s*(#[^\n]*\n|\S+)", data[pos:])
        if m is None:
            raise UnsupportedFormat("truncated PNM header")
        tok = m.group(1)
        pos += m.end()
        if not tok.startswith(b"#"):
            tokens.append(tok)
    return tokens, pos


def load_mask(path, pitch: float) -> ObjectMask:
    """8- or 16-bit grayscale PGM (P2 or P5), values mapped linearly to [0, 1]."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"cannot read mask {path}: {exc}") from exc
    if len(data) < 2 or data[:1] != b"P":
        raise UnsupportedFormat(f"{path}: not a portable graymap")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"{path}: unsupported PNM magic {magic!r}")
    tokens, pos = _read_pnm_tokens(data[2:], 3)
    width, height, maxval = (int(t) for t in tokens)
    if maxval <= 0 or maxval > 65535:
        raise UnsupportedFormat(f"{path}: maxval {maxval} out of range")
    npx = width * height
    if magic == b"P2":
        vals = np.array(data[2 + pos:].split()[:npx], dtype=float)
        if vals.size != npx:
            raise UnsupportedFormat(f"{path}: truncated P2 payload")
    else:
        start = 2 + pos + 1  # single whitespace after maxval
        dt = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[start:start + npx * dt.itemsize]
        if len(raw) != npx * dt.itemsize:
            raise UnsupportedFormat(f"{path}: truncated P5 payload")
        vals = np.frombuffer(raw, dtype=dt).astype(float)
    grid = (vals / maxval).reshape(height, width).T  # PNM rows are y, we use x-major
    return ObjectMask(transmission=grid, pitch=pitch)


def save_pgm16(path, image: np.ndarray):
    """Write a min-max normalized 16-bit big-endian PGM; returns (lo, hi)."""
    img = np.asarray(image, dtype=float)
    lo, hi = float(img.min()), float(img.max())
    span = hi - lo if hi > lo else 1.0
    q = np.rint((img - lo) / span * 65535.0).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n65535\n" % (q.shape[0], q.shape[1]))
        fh.write(q.T.tobytes())  # back to PNM row order
    return lo, hi


def save_csv(path, array: np.ndarray, header: str = ""):
    """CSV with 17-significant-digit decimal floats."""
    np.savetxt(path, np.asarray(array, dtype=float), delimiter=",",
               fmt="%.17g", header=header, comments="")
