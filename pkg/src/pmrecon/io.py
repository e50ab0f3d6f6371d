"""File formats: KSPC k-space containers, mask documents, images, reports.

KSPC layout (all little-endian)::

    b"KSPC" | version u8 = 1 | ndims u8 = 3 | 2 reserved zero bytes
    ndims x u64 dims (ncoils, nrows, ncols)
    prod(dims) x complex64 samples (re, im float32 interleaved), C order
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from pathlib import Path

import numpy as np

from pmrecon.core import MetricsReport, SamplingMask, as_kspace
from pmrecon.masking import expected_sampled

MAGIC = b"KSPC"
VERSION = 1
NDIMS = 3
HEADER_SIZE = 8
SAMPLE_SIZE = 8
MAX_BYTES = 2**63 - 1

PGM_MAXVAL = 65535

CSV_COLUMNS = ("method", "accel", "acs", "psnr_db", "ssim", "runtime_s")
METRIC_CONVENTION = {
    "crop": "none",
    "data_range": "max(reference)",
    "ssim_window": "7x7 uniform, valid positions, population moments",
}


class FormatError(ValueError):
    """A file does not match its declared format."""


# --- k-space ---------------------------------------------------------------

def ksp_file_size(dims) -> int:
    return HEADER_SIZE + 8 * len(dims) + SAMPLE_SIZE * math.prod(dims)


def write_ksp(path, kspace) -> None:
    kspace = as_kspace(kspace)
    header = MAGIC + struct.pack("<BB2x", VERSION, NDIMS) + struct.pack("<3Q", *kspace.shape)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(kspace, dtype="<c8").tobytes())


def read_ksp(path) -> np.ndarray:
    """Load a KSPC file as a complex128 array of shape (ncoils, nrows, ncols)."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    version, ndims = raw[4], raw[5]
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}, expected {VERSION}")
    if ndims != NDIMS:
        raise FormatError(f"{path}: expected {NDIMS} dimensions, header declares {ndims}")
    if raw[6:8] != b"\x00\x00":
        raise FormatError(f"{path}: reserved header bytes are not zero")
    dims_end = HEADER_SIZE + 8 * ndims
    if len(raw) < dims_end:
        raise FormatError(f"{path}: truncated dimension block")
    dims = struct.unpack_from(f"<{ndims}Q", raw, HEADER_SIZE)
    if min(dims) == 0:
        raise FormatError(f"{path}: zero-length dimension in {dims}")
    if SAMPLE_SIZE * math.prod(dims) > MAX_BYTES - dims_end:
        raise FormatError(f"{path}: dimensions {dims} overflow the addressable size")
    expected = ksp_file_size(dims)
    if len(raw) < expected:
        raise FormatError(f"{path}: truncated payload, {len(raw)} of {expected} bytes")
    if len(raw) > expected:
        raise FormatError(f"{path}: {len(raw) - expected} trailing bytes after payload")
    data = np.frombuffer(raw, dtype="<c8", offset=dims_end).reshape(dims)
    if not np.all(np.isfinite(data)):
        raise FormatError(f"{path}: non-finite samples")
    return data.astype(np.complex128)


# --- masks -----------------------------------------------------------------

def mask_to_text(mask: SamplingMask) -> str:
    doc = mask.params()
    doc["sampled"] = [int(c) for c in mask.columns]
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def mask_from_text(text: str) -> SamplingMask:
    try:
        doc = json.loads(text)
        fields = {k: int(doc[k]) for k in ("ncols", "accel", "acs_start", "acs_count", "lattice_offset")}
        listed = [int(c) for c in doc["sampled"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed mask document: {exc}") from exc
    ncols, accel = fields["ncols"], fields["accel"]
    if ncols < 1 or accel < 1 or not 0 <= fields["lattice_offset"] < accel:
        raise FormatError(f"mask document has invalid parameters {fields}")
    a0, na = fields["acs_start"], fields["acs_count"]
    if na < 0 or (na > 0 and (a0 < 0 or a0 + na > ncols)):
        raise FormatError(f"ACS block [{a0}, {a0 + na}) does not fit in {ncols} columns")
    sampled = expected_sampled(ncols, accel, a0, na, fields["lattice_offset"])
    if listed != np.flatnonzero(sampled).tolist():
        raise FormatError("sampled column list disagrees with accel/offset/ACS fields")
    return SamplingMask(sampled=sampled, **fields)


def write_mask(path, mask: SamplingMask) -> None:
    Path(path).write_text(mask_to_text(mask))


def read_mask(path) -> SamplingMask:
    return mask_from_text(Path(path).read_text())


# --- images ----------------------------------------------------------------

def pgm_bytes(img) -> bytes:
    """16-bit binary PGM, linearly scaled so ``max(img)`` maps to 65535."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"PGM needs a 2D image, got shape {img.shape}")
    peak = float(img.max()) if img.size else 0.0
    if peak > 0:
        samples = np.floor(np.clip(img, 0, None) / peak * PGM_MAXVAL + 0.5)
    else:
        samples = np.zeros_like(img)
    height, width = img.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + samples.astype(">u2").tobytes()


def write_image_pgm(img, path) -> None:
    Path(path).write_bytes(pgm_bytes(img))


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM back as floats scaled to ``[0, 1]``."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
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
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    pos += 1
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    dtype = ">u2" if maxval > 255 else "u1"
    count = width * height
    if len(raw) - pos < count * np.dtype(dtype).itemsize:
        raise FormatError(f"{path}: truncated PGM payload")
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=pos)
    return data.reshape(height, width).astype(np.float64) / maxval


def write_image(path, img) -> None:
    """Write ``.pgm`` for viewing, anything else as a lossless ``.npy`` array."""
    if str(path).lower().endswith(".pgm"):
        write_image_pgm(img, path)
    else:
        with open(path, "wb") as f:
            np.save(f, np.asarray(img, dtype=np.float64))


def read_image(path) -> np.ndarray:
    if str(path).lower().endswith(".pgm"):
        return read_pgm(path)
    try:
        img = np.load(path, allow_pickle=False)
    except ValueError as exc:
        raise FormatError(f"{path}: not a .npy image ({exc})") from exc
    if img.ndim != 2 or np.iscomplexobj(img):
        raise FormatError(f"{path}: expected a real 2D image, got {img.dtype} {img.shape}")
    return img.astype(np.float64)


# --- reports ---------------------------------------------------------------

def fmt6(value) -> str:
    """Six significant digits, ``inf`` for the perfect-reconstruction sentinel."""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def _json_number(value):
    text = fmt6(value)
    return text if "inf" in text else float(text)


def _jsonable(value):
    if isinstance(value, (float, np.floating)):
        return _json_number(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def report_to_text(entries) -> str:
    doc = {
        "convention": METRIC_CONVENTION,
        "methods": [
            {
                "method": e.method,
                "psnr_db": _json_number(e.psnr_db),
                "ssim": _json_number(e.ssim),
                "accel": e.accel,
                "acs_count": e.acs_count,
                "params": _jsonable(e.params),
                "runtime_s": None if e.runtime_s is None else _json_number(e.runtime_s),
            }
            for e in entries
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def report_to_csv(entries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for e in entries:
        writer.writerow([
            e.method,
            "" if e.accel is None else e.accel,
            "" if e.acs_count is None else e.acs_count,
            fmt6(e.psnr_db),
            fmt6(e.ssim),
            "" if e.runtime_s is None else fmt6(e.runtime_s),
        ])
    return buf.getvalue()


def report_paths(path):
    """JSON report at ``path``; the CSV twin replaces a ``.json`` suffix with ``.csv``."""
    path = Path(path)
    csv_path = path.with_suffix(".csv") if path.suffix == ".json" else path.with_name(path.name + ".csv")
    return path, csv_path


def write_report(entries, path):
    entries = list(entries)
    json_path, csv_path = report_paths(path)
    json_path.write_text(report_to_text(entries))
    csv_path.write_text(report_to_csv(entries))
    return json_path, csv_path


def _report_from_dict(d) -> MetricsReport:
    return MetricsReport(
        method=d["method"],
        psnr_db=float(d["psnr_db"]),
        ssim=float(d["ssim"]),
        accel=d.get("accel"),
        acs_count=d.get("acs_count"),
        params=d.get("params", {}),
        runtime_s=d.get("runtime_s"),
    )


def read_report(path) -> list[MetricsReport]:
    doc = json.loads(Path(path).read_text())
    return [_report_from_dict(d) for d in doc["methods"]]
