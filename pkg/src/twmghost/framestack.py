"""Binary frame-stack persistence for per-shot detector maps.

Layout (little-endian):

    magic   4 bytes  b"TWMG"
    u32     format version (1)
    u32     W
    u32     H
    u32     n_shots
    u64     master seed
    u32     length of RNG algorithm name, then that many UTF-8 bytes
    payload n_shots * (I1 then I2), each W*H float64, row-major (x-major)

Payload length is validated against the header on read.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import CorruptStack
from .pipeline import ShotRecord

MAGIC = b"TWMG"
VERSION = 1
_HEAD = struct.Struct("<4sIIIIQI")


@dataclass(frozen=True)
class StackHeader:
    width: int
    height: int
    n_shots: int
    master_seed: int
    rng_algorithm: str

    @property
    def frame_bytes(self) -> int:
        return 2 * self.width * self.height * 8


def write_stack(path, shots: Iterable[ShotRecord], width: int, height: int,
                n_shots: int, master_seed: int, rng_algorithm: str) -> StackHeader:
    """Write the stack; shots must arrive in shot_index order."""
    name = rng_algorithm.encode("utf-8")
    header = StackHeader(width, height, n_shots, master_seed, rng_algorithm)
    written = 0
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, width, height, n_shots, master_seed, len(name)))
        fh.write(name)
        for shot in shots:
            for frame in (shot.i1, shot.i2):
                a = np.ascontiguousarray(frame, dtype="<f8")
                if a.shape != (width, height):
                    raise CorruptStack(f"frame shape {a.shape} != ({width}, {height})")
                fh.write(a.tobytes())
            written += 1
    if written != n_shots:
        raise CorruptStack(f"wrote {written} shots, header said {n_shots}")
    return header


def read_header(path) -> tuple[StackHeader, int]:
    """Header plus the payload byte offset; validates magic, version, size."""
    p = Path(path)
    try:
        with open(p, "rb") as fh:
            head = fh.read(_HEAD.size)
            if len(head) != _HEAD.size:
                raise CorruptStack(f"{path}: truncated header")
            magic, version, w, h, n, seed, namelen = _HEAD.unpack(head)
            if magic != MAGIC:
                raise CorruptStack(f"{path}: bad magic {magic!r}")
            if version != VERSION:
                raise CorruptStack(f"{path}: unsupported version {version}")
            name = fh.read(namelen)
            if len(name) != namelen:
                raise CorruptStack(f"{path}: truncated RNG name")
    except OSError as exc:
        raise CorruptStack(f"{path}: {exc}") from exc
    header = StackHeader(w, h, n, seed, name.decode("utf-8"))
    offset = _HEAD.size + namelen
    expect = offset + n * header.frame_bytes
    if p.stat().st_size != expect:
        raise CorruptStack(f"{path}: size {p.stat().st_size} != expected {expect}")
    return header, offset


def iter_shots(path) -> Iterator[ShotRecord]:
    """Stream ShotRecords back from a stack file."""
    header, offset = read_header(path)
    shape = (header.width, header.height)
    count = header.width * header.height
    with open(path, "rb") as fh:
        fh.seek(offset)
        for idx in range(header.n_shots):
            i1 = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(shape)
            i2 = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(shape)
            yield ShotRecord(i1=i1, i2=i2, shot_index=idx)


def read_all(path) -> list[ShotRecord]:
    return list(iter_shots(path))
