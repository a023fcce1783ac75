"""Matrix persistence (CSV and a binary container) and PGM image ingestion.

Binary container layout, little-endian:

    bytes 0-3    magic "RPCA"
    bytes 4-7    format version, u32 (currently 1)
    bytes 8-15   rows, u64
    bytes 16-23  cols, u64
    bytes 24-    rows*cols float64 payload, row-major

The binary round-trip is bit-exact.  CSV uses '.' decimals, ',' delimiters,
'\\n' row terminators and no header; entries are written with Python's
shortest round-trip float formatting, so a CSV round-trip is also exact.

Images are read from binary PGM (P5) files with maxval < 256 only; stacks
vectorize each image in column-major order (column j of the stack is image
j read down its columns).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .linalg import ensure_matrix

MAGIC = b"RPCA"
BINARY_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")  # magic, version, rows, cols
FORMATS = ("csv", "binary")


class MatrixFormatError(ValueError):
    """A matrix file is malformed; the message carries the byte/line position."""


class ImageFormatError(ValueError):
    """An image file is not a supported binary PGM."""


def save_matrix(m: np.ndarray, path, format: str = "binary") -> None:
    """Write a matrix to `path` as CSV or the binary container."""
    m = ensure_matrix(m)
    path = Path(path)
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, BINARY_VERSION, m.shape[0], m.shape[1]))
            fh.write(np.ascontiguousarray(m, dtype="<f8").tobytes())
    elif format == "csv":
        with open(path, "w", encoding="ascii", newline="") as fh:
            for row in m:
                fh.write(",".join(repr(float(x)) for x in row))
                fh.write("\n")
    else:
        raise ValueError(f"unknown format {format!r}, expected one of {FORMATS}")


def load_matrix(path, format: str = "binary") -> np.ndarray:
    """Read a matrix written by `save_matrix`, validating shape and finiteness."""
    path = Path(path)
    if format == "binary":
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path)
    raise ValueError(f"unknown format {format!r}, expected one of {FORMATS}")


def _load_binary(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise MatrixFormatError(
            f"{path}: malformed header, file ends at byte {len(raw)} "
            f"(need {_HEADER.size})"
        )
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise MatrixFormatError(f"{path}: malformed header, bad magic at byte 0")
    if version != BINARY_VERSION:
        raise MatrixFormatError(f"{path}: unsupported version {version} at byte 4")
    expected = rows * cols * 8
    payload = raw[_HEADER.size :]
    if len(payload) != expected:
        raise MatrixFormatError(
            f"{path}: payload mismatch at byte {_HEADER.size}: header says "
            f"{rows}x{cols} ({expected} bytes), found {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f8").reshape(rows, cols)
    bad = np.flatnonzero(~np.isfinite(data))
    if bad.size:
        byte = _HEADER.size + int(bad[0]) * 8
        raise MatrixFormatError(f"{path}: non-finite value at byte {byte}")
    return data.astype(float)


def _load_csv(path: Path) -> np.ndarray:
    text = path.read_text(encoding="ascii")
    if not text.strip():
        raise MatrixFormatError(f"{path}: malformed header, file is empty")
    rows = []
    ncols = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if ncols is None:
            ncols = len(cells)
        elif len(cells) != ncols:
            raise MatrixFormatError(
                f"{path}:{lineno}: dimension mismatch, expected {ncols} "
                f"columns, found {len(cells)}"
            )
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise MatrixFormatError(
                    f"{path}:{lineno}: column {col}: not a number: {cell!r}"
                ) from None
            if not np.isfinite(value):
                raise MatrixFormatError(
                    f"{path}:{lineno}: column {col}: non-finite value {cell!r}"
                )
            row.append(value)
        rows.append(row)
    return np.array(rows, dtype=float)


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM image into a float array of shape (h, w)."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] != b"P5":
        raise ImageFormatError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    fields = []
    while len(fields) < 3:
        # Skip whitespace and '#' comment lines between header tokens.
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated PGM header")
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise ImageFormatError(f"{path}: non-numeric PGM header fields") from None
    if maxval <= 0 or maxval > 255:
        raise ImageFormatError(f"{path}: unsupported maxval {maxval} (need 1..255)")
    expected = width * height
    pixels = raw[pos : pos + expected]
    if len(pixels) != expected:
        raise ImageFormatError(
            f"{path}: pixel payload has {len(pixels)} bytes, expected {expected}"
        )
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).astype(float)


def write_pgm(path, image: np.ndarray) -> None:
    """Write a float image as 8-bit binary PGM, clamping into [0, 255]."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ImageFormatError(f"image must be 2-D, got ndim={image.ndim}")
    clamped = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (image.shape[1], image.shape[0]))
        fh.write(clamped.tobytes())


def stack_images(paths) -> np.ndarray:
    """Vectorize PGM images into a (height*width) x count matrix.

    Column j holds image j flattened in column-major order; all images
    must share the same dimensions.
    """
    paths = list(paths)
    if not paths:
        raise ValueError("need at least one image")
    columns = []
    shape = None
    for p in paths:
        img = read_pgm(p)
        if shape is None:
            shape = img.shape
        elif img.shape != shape:
            raise ImageFormatError(
                f"{p}: size {img.shape[1]}x{img.shape[0]} does not match "
                f"first image {shape[1]}x{shape[0]}"
            )
        columns.append(img.flatten(order="F"))
    return np.column_stack(columns)
