"""Load sample manifests and pre-extracted frame sequences into memory.

Manifests are line-delimited JSON with keys ``id``, ``frames_dir``,
``question``, ``answer``. Frame directories hold 8-bit binary portable
graymaps (``*.pgm``, P5) or pixmaps (``*.ppm``, P6); pixmaps are converted
to luma on load. Frames are ordered by lexicographic filename comparison on
the raw bytes, so indices must be zero-padded by the producer.
"""

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    MissingField,
    MalformedRecord,
    ShapeMismatch,
    TooFewFrames,
    UnsupportedFormat,
)
from .jsonl import read_jsonl

# Luma weights, ITU-R BT.601. They sum to 1 so gray inputs are fixed points.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_MANIFEST_FIELDS = ("id", "frames_dir", "question", "answer")

# Extensions that are clearly images but not a format we decode.
_KNOWN_IMAGE_EXTS = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".tif", ".tiff", ".webp"}


@dataclass(frozen=True)
class SampleManifestEntry:
    id: str
    frames_dir: str
    question: str
    answer: str


@dataclass
class FrameSequence:
    """An ordered stack of same-sized grayscale frames for one sample.

    ``frames`` is a (T, H, W) uint8 array; at least two frames are required
    because every downstream proxy averages over adjacent pairs.
    """

    id: str
    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames)
        if frames.ndim != 3:
            raise ShapeMismatch(f"frames must be (T, H, W), got {frames.shape}")
        if frames.shape[0] < 2:
            raise TooFewFrames(self.id, frames.shape[0])
        if frames.dtype != np.uint8:
            if np.any(frames < 0) or np.any(frames > 255):
                raise ShapeMismatch("pixel values must lie in [0, 255]")
            frames = frames.astype(np.uint8)
        self.frames = frames

    @property
    def count(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]


def load_manifest(path) -> list[SampleManifestEntry]:
    """Parse a manifest file, rejecting duplicate ids and incomplete records."""
    entries = []
    seen = set()
    for line_no, record in read_jsonl(path):
        for field in _MANIFEST_FIELDS:
            if field not in record or record[field] is None:
                raise MissingField(field, line_no)
            if not isinstance(record[field], str):
                raise MalformedRecord(line_no, f"field {field!r} must be a string")
        if not record["id"]:
            raise MissingField("id", line_no)
        if record["id"] in seen:
            raise DuplicateId(record["id"])
        seen.add(record["id"])
        entries.append(
            SampleManifestEntry(
                id=record["id"],
                frames_dir=record["frames_dir"],
                question=record["question"],
                answer=record["answer"],
            )
        )
    return entries


def save_manifest(entries, path) -> None:
    """Inverse of load_manifest; the round trip is lossless."""
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(
                json.dumps(
                    {
                        "id": e.id,
                        "frames_dir": e.frames_dir,
                        "question": e.question,
                        "answer": e.answer,
                    },
                    separators=(",", ":"),
                )
            )
            fh.write("\n")


def to_grayscale(rgb) -> np.ndarray:
    """BT.601 luma conversion, rounded to nearest integer (ties away from zero).

    Already-gray inputs (R=G=B=v) map back to v exactly since the weights
    sum to 1.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ShapeMismatch(f"expected an (H, W, 3) array, got {rgb.shape}")
    if np.any(rgb < 0) or np.any(rgb > 255):
        raise ShapeMismatch("channel values must lie in [0, 255]")
    luma = rgb.astype(np.float64) @ _LUMA_WEIGHTS
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)


def load_frames(frames_dir, sample_id: str | None = None) -> FrameSequence:
    """Read every .pgm/.ppm file under ``frames_dir`` into a FrameSequence.

    Filename order is byte-lexicographic, independent of how the filesystem
    enumerates entries. Directory existence is validated here rather than at
    manifest-parse time so a bad sample fails in isolation.
    """
    frames_dir = Path(frames_dir)
    if not frames_dir.is_dir():
        raise TooFewFrames(str(frames_dir), 0)

    names = []
    for name in os.listdir(frames_dir):
        if not (frames_dir / name).is_file():
            continue
        ext = Path(name).suffix.lower()
        if ext in (".pgm", ".ppm"):
            names.append(name)
        elif ext in _KNOWN_IMAGE_EXTS:
            raise UnsupportedFormat(str(frames_dir / name), "only 8-bit PGM/PPM are decoded")
    names.sort(key=os.fsencode)

    if len(names) < 2:
        raise TooFewFrames(str(frames_dir), len(names))

    frames = []
    shape = None
    for name in names:
        path = frames_dir / name
        gray = _read_netpbm_gray(path)
        if shape is None:
            shape = gray.shape
        elif gray.shape != shape:
            raise DimensionMismatch(str(path), shape, gray.shape)
        frames.append(gray)

    return FrameSequence(id=sample_id or frames_dir.name, frames=np.stack(frames))


def _read_netpbm_gray(path) -> np.ndarray:
    """Decode a binary P5 graymap or P6 pixmap (maxval 255) to a gray frame."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormat(str(path), f"bad magic {magic!r}")
    try:
        width, height, maxval, offset = _parse_netpbm_header(data)
    except ValueError as exc:
        raise UnsupportedFormat(str(path), str(exc)) from exc
    if maxval != 255:
        raise UnsupportedFormat(str(path), f"maxval {maxval}, only 8-bit supported")

    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    pixels = np.frombuffer(data, dtype=np.uint8, count=-1, offset=offset)
    if pixels.size < expected:
        raise UnsupportedFormat(str(path), "truncated pixel data")
    pixels = pixels[:expected]
    if channels == 1:
        return pixels.reshape(height, width).copy()
    return to_grayscale(pixels.reshape(height, width, 3))


def _parse_netpbm_header(data: bytes):
    """Return (width, height, maxval, data_offset); comments (#) are allowed."""
    tokens = []
    pos = 2  # past magic
    while len(tokens) < 3:
        match = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)").match(data, pos)
        if match is None:
            raise ValueError("header ended early")
        token = match.group(1)
        if token.startswith(b"#"):
            pos = data.index(b"\n", match.start(1)) + 1
            continue
        tokens.append(token)
        pos = match.end()
    # exactly one whitespace byte separates the header from pixel data
    if pos >= len(data):
        raise ValueError("no pixel data")
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ValueError(f"non-numeric header fields {tokens}")
    if width <= 0 or height <= 0:
        raise ValueError(f"bad dimensions {width}x{height}")
    return width, height, maxval, pos + 1


def write_pgm(path, gray) -> None:
    """Write a binary 8-bit P5 graymap. Used by fixtures and external tools."""
    gray = np.asarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ShapeMismatch(f"expected an (H, W) array, got {gray.shape}")
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def write_ppm(path, rgb) -> None:
    """Write a binary 8-bit P6 pixmap."""
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ShapeMismatch(f"expected an (H, W, 3) array, got {rgb.shape}")
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
