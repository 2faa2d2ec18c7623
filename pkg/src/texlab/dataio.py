"""File formats: dataset manifests, PPM images, loss traces, checkpoints.

All writers go through write-to-temp-then-rename, and all formats are
deterministic: floats serialize via repr (shortest round-trip form), JSON
metadata is key-sorted, and images quantize with a fixed rule. Checkpoints
are a little-endian binary layout with a trailing CRC32.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorruptCheckpointError,
    DomainError,
    LengthMismatchError,
    ShapeMismatchError,
    VersionMismatchError,
)

CHECKPOINT_MAGIC = b"TXL1"
CHECKPOINT_VERSION = 1

JOINT_TRACE_COLUMNS = ("step", "D_loss", "G_loss", "G_loss_d", "G_loss_f")
DCGAN_TRACE_COLUMNS = ("step", "D_loss", "G_loss")


def atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(f"{path.name}.tmp{os.getpid()}")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


# ---------------------------------------------------------------------------
# images: binary PPM (P6), values mapped from [-1, 1] by round((v+1)*127.5)


def write_ppm(path, image) -> None:
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ShapeMismatchError(f"expected HxWx3 image, got shape {img.shape}")
    h, w = img.shape[:2]
    quantized = np.clip(np.round((img + 1.0) * 127.5), 0, 255).astype(np.uint8)
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + quantized.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DomainError(f"truncated PPM header in {path}")
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    if fields[0] != b"P6" or fields[3] != b"255":
        raise DomainError(f"unsupported PPM header {fields!r} in {path}")
    w, h = int(fields[1]), int(fields[2])
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos)
    if pixels.size != w * h * 3:
        raise DomainError(f"PPM pixel payload truncated in {path}")
    return pixels.reshape(h, w, 3).astype(np.float64) / 127.5 - 1.0


# ---------------------------------------------------------------------------
# tab-separated value files


def format_float(v) -> str:
    return repr(float(v))


def write_vectors(path, rows) -> None:
    """One tab-separated line of decimal literals per vector."""
    lines = ["\t".join(format_float(v) for v in np.asarray(row).ravel()) for row in rows]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_vectors(path, dim: int | None = None) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line:
            continue
        values = [float(tok) for tok in line.split("\t")]
        if rows and len(values) != len(rows[0]):
            raise LengthMismatchError(f"{path}:{lineno}: row arity changed")
        rows.append(values)
    if not rows:
        raise LengthMismatchError(f"{path}: no vectors found")
    out = np.asarray(rows, dtype=np.float64)
    if dim is not None and out.shape[1] != dim:
        raise LengthMismatchError(f"{path}: expected {dim} columns, found {out.shape[1]}")
    return out


@dataclass
class Manifest:
    names: list
    semantics: np.ndarray
    features: np.ndarray | None

    @property
    def count(self) -> int:
        return len(self.names)


def write_manifest(path, names, semantics, features=None) -> None:
    """Header describes the column blocks; every row must match its arity."""
    semantics = np.asarray(semantics, dtype=np.float64)
    if semantics.ndim != 2 or len(names) != semantics.shape[0]:
        raise LengthMismatchError("names and semantics row counts differ")
    columns = ["image", f"sem:{semantics.shape[1]}"]
    if features is not None:
        features = np.asarray(features, dtype=np.float64)
        if features.shape[0] != len(names):
            raise LengthMismatchError("names and features row counts differ")
        columns.append(f"feat:{features.shape[1]}")
    lines = ["\t".join(columns)]
    for i, name in enumerate(names):
        cells = [str(name)]
        cells.extend(format_float(v) for v in semantics[i])
        if features is not None:
            cells.extend(format_float(v) for v in features[i])
        lines.append("\t".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_header(header: str):
    parts = header.split("\t")
    if not parts or parts[0] != "image":
        raise LengthMismatchError(f"manifest header must start with 'image', got {header!r}")
    blocks = []
    for part in parts[1:]:
        name, _, count = part.partition(":")
        if name not in ("sem", "feat") or not count.isdigit() or int(count) < 1:
            raise LengthMismatchError(f"bad manifest column block {part!r}")
        blocks.append((name, int(count)))
    names = [b[0] for b in blocks]
    if names != ["sem"] and names != ["sem", "feat"]:
        raise LengthMismatchError(f"manifest needs sem[, feat] blocks, got {names}")
    return blocks


def read_manifest(path) -> Manifest:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise LengthMismatchError(f"{path}: empty manifest")
    blocks = _parse_header(lines[0])
    arity = 1 + sum(count for _, count in blocks)
    names, sem_rows, feat_rows = [], [], []
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != arity:
            raise LengthMismatchError(
                f"{path}:{lineno}: row has {len(cells)} cells, header demands {arity}"
            )
        names.append(cells[0])
        offset = 1
        for block, count in blocks:
            values = [float(tok) for tok in cells[offset : offset + count]]
            (sem_rows if block == "sem" else feat_rows).append(values)
            offset += count
    if not names:
        raise LengthMismatchError(f"{path}: manifest has no rows")
    semantics = np.asarray(sem_rows, dtype=np.float64)
    features = np.asarray(feat_rows, dtype=np.float64) if feat_rows else None
    return Manifest(names, semantics, features)


def write_loss_trace(path, columns, rows) -> None:
    lines = ["\t".join(columns)]
    for row in rows:
        step, losses = row[0], row[1:]
        lines.append("\t".join([str(int(step))] + [format_float(v) for v in losses]))
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# checkpoints


@dataclass
class OptimizerState:
    step: int
    tensors: dict


@dataclass
class Checkpoint:
    kind: str
    tensors: dict
    metadata: dict
    optimizer: OptimizerState | None


def _pack_tensors(tensors: dict) -> bytes:
    chunks = [struct.pack("<I", len(tensors))]
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(arr, dtype="<f4")
        if arr.ndim == 0:
            arr = arr.reshape(1)
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptCheckpointError("checkpoint truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _read_tensors(reader: _Reader) -> dict:
    (count,) = reader.unpack("<I")
    tensors = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        name = reader.take(name_len).decode("utf-8")
        (rank,) = reader.unpack("<B")
        shape = reader.unpack(f"<{rank}I")
        size = int(np.prod(shape)) if rank else 1
        raw = reader.take(4 * size)
        tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
    return tensors


def save_checkpoint(path, kind: str, tensors: dict, metadata: dict | None = None,
                    optimizer: OptimizerState | None = None) -> None:
    """Serialize named float32 tensors plus metadata; round-trips bitwise."""
    kind_bytes = kind.encode("utf-8")
    if len(kind_bytes) > 255:
        raise DomainError("model kind tag too long")
    meta_bytes = json.dumps(metadata or {}, sort_keys=True).encode("utf-8")
    parts = [
        CHECKPOINT_MAGIC,
        struct.pack("<H", CHECKPOINT_VERSION),
        struct.pack("<B", len(kind_bytes)),
        kind_bytes,
        struct.pack("<I", len(meta_bytes)),
        meta_bytes,
        _pack_tensors(tensors),
    ]
    if optimizer is not None:
        parts.append(b"\x01")
        parts.append(struct.pack("<Q", optimizer.step))
        parts.append(_pack_tensors(optimizer.tensors))
    else:
        parts.append(b"\x00")
    payload = b"".join(parts)
    payload += struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)
    atomic_write_bytes(path, payload)


def load_checkpoint(path) -> Checkpoint:
    data = Path(path).read_bytes()
    if len(data) < len(CHECKPOINT_MAGIC) + 2 + 4:
        raise CorruptCheckpointError(f"{path}: file too short for a checkpoint")
    if data[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise CorruptCheckpointError(f"{path}: bad magic")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
        raise CorruptCheckpointError(f"{path}: CRC mismatch")
    reader = _Reader(data[:-4])
    reader.take(len(CHECKPOINT_MAGIC))
    (version,) = reader.unpack("<H")
    if version != CHECKPOINT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, expected {CHECKPOINT_VERSION}")
    (kind_len,) = reader.unpack("<B")
    kind = reader.take(kind_len).decode("utf-8")
    (meta_len,) = reader.unpack("<I")
    try:
        metadata = json.loads(reader.take(meta_len).decode("utf-8"))
    except ValueError as exc:
        raise CorruptCheckpointError(f"{path}: bad metadata block: {exc}") from exc
    tensors = _read_tensors(reader)
    (opt_flag,) = reader.unpack("<B")
    optimizer = None
    if opt_flag == 1:
        (step,) = reader.unpack("<Q")
        optimizer = OptimizerState(step=int(step), tensors=_read_tensors(reader))
    elif opt_flag != 0:
        raise CorruptCheckpointError(f"{path}: bad optimizer flag {opt_flag}")
    if reader.pos != len(reader.data):
        raise CorruptCheckpointError(f"{path}: trailing bytes after payload")
    return Checkpoint(kind=kind, tensors=tensors, metadata=metadata, optimizer=optimizer)
