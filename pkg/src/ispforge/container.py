"""ispds-1 dataset container: manifest.json plus one tensor blob per array.

Blob layout (bit-exact contract):

    bytes 0..3   ASCII magic "ISPT"
    byte  4      dtype code: 1 = float32, 2 = complex64 (interleaved f32)
    byte  5      rank
    bytes 6..7   reserved, zero
    next rank*8  little-endian uint64 dimensions
    payload      row-major little-endian values

Per-sample tensors are stacked along the first axis of one blob per array
kind (truth/scatter/bp/etot); the manifest's sample table carries each
sample's row index plus the fixed record stride, from which byte offsets
follow. Scalar per-sample metadata (quality factor, category, permittivity,
alpha) lives in the sample table itself.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PhysicsConfig
from .errors import (
    BadMagicError,
    ContainerFormatError,
    TruncatedFileError,
    VersionMismatchError,
)
from .quality import SampleRecord, category_histogram

FORMAT_VERSION = "ispds-1"
MAGIC = b"ISPT"
_DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<c8")}
_CODE_OF_DTYPE = {np.dtype("<f4"): 1, np.dtype("<c8"): 2}


def write_blob(path: Path, array: np.ndarray) -> None:
    """Serialize one float32/complex64 array as an ISPT blob."""
    arr = np.ascontiguousarray(array)
    if arr.dtype not in _CODE_OF_DTYPE:
        raise ContainerFormatError(
            f"blob dtype must be float32 or complex64, got {arr.dtype}"
        )
    header = MAGIC + struct.pack("<BBH", _CODE_OF_DTYPE[arr.dtype], arr.ndim, 0)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    path.write_bytes(header + dims + arr.tobytes())


def read_blob(path: Path) -> np.ndarray:
    """Read one ISPT blob, validating magic, dtype, rank and payload size."""
    data = path.read_bytes()
    if len(data) < 8:
        raise TruncatedFileError(f"{path}: shorter than the fixed blob header")
    if data[:4] != MAGIC:
        raise BadMagicError(f"{path}: magic {data[:4]!r}, expected {MAGIC!r}")
    code, rank, reserved = struct.unpack("<BBH", data[4:8])
    if code not in _DTYPE_CODES:
        raise ContainerFormatError(f"{path}: unknown dtype code {code}")
    if reserved != 0:
        raise ContainerFormatError(f"{path}: reserved header bytes must be zero")
    if len(data) < 8 + 8 * rank:
        raise TruncatedFileError(f"{path}: truncated inside the dimension list")
    dims = struct.unpack(f"<{rank}Q", data[8 : 8 + 8 * rank])
    dtype = _DTYPE_CODES[code]
    expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize if rank else dtype.itemsize
    payload = data[8 + 8 * rank :]
    if len(payload) != expected:
        raise TruncatedFileError(
            f"{path}: payload holds {len(payload)} bytes, dims {dims} require {expected}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(dims).copy()


@dataclass
class Dataset:
    """In-memory dataset: physics snapshot, sample records, optional shared operator."""

    physics: PhysicsConfig
    samples: list[SampleRecord] = field(default_factory=list)
    g_domain: np.ndarray | None = None  # (n_cells, n_cells) complex64, optional
    pred: np.ndarray | None = None  # (n, grid, grid) float32, prediction containers

    def __len__(self) -> int:
        return len(self.samples)


_ARRAY_FILES = {
    "truth": "truth.ispt",
    "scatter": "scatter.ispt",
    "bp": "bp.ispt",
    "etot": "etot.ispt",
    "g_domain": "g_domain.ispt",
    "pred": "pred.ispt",
}


def _array_meta(name: str, arr: np.ndarray) -> dict:
    record_bytes = int(np.prod(arr.shape[1:], dtype=np.uint64)) * arr.dtype.itemsize
    return {
        "file": _ARRAY_FILES[name],
        "dtype": "float32" if arr.dtype == np.dtype("<f4") else "complex64",
        "shape": list(arr.shape),
        "header_bytes": 8 + 8 * arr.ndim,
        "record_bytes": record_bytes,
    }


def write_container(dataset: Dataset, path: str | Path) -> Path:
    """Write a dataset directory; returns the path to manifest.json."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    n = len(dataset.samples)
    grid = dataset.physics.grid_n

    stacks: dict[str, np.ndarray] = {}
    if n:
        stacks["truth"] = np.stack([np.asarray(s.truth, dtype="<f4") for s in dataset.samples])
        stacks["scatter"] = np.stack(
            [np.asarray(s.scatter_noisy, dtype="<c8") for s in dataset.samples]
        )
        stacks["bp"] = np.stack([np.asarray(s.bp, dtype="<c8") for s in dataset.samples])
        if all(s.etot is not None for s in dataset.samples):
            stacks["etot"] = np.stack(
                [np.asarray(s.etot, dtype="<c8") for s in dataset.samples]
            )
    else:
        stacks["truth"] = np.zeros((0, grid, grid), dtype="<f4")
        stacks["scatter"] = np.zeros(
            (0, dataset.physics.n_rx, dataset.physics.n_tx), dtype="<c8"
        )
        stacks["bp"] = np.zeros((0, grid, grid), dtype="<c8")
    if dataset.g_domain is not None:
        stacks["g_domain"] = np.asarray(dataset.g_domain, dtype="<c8")
    if dataset.pred is not None:
        stacks["pred"] = np.asarray(dataset.pred, dtype="<f4")

    arrays_meta = {}
    for name, arr in stacks.items():
        write_blob(root / _ARRAY_FILES[name], arr)
        arrays_meta[name] = _array_meta(name, arr)

    table = []
    for index, rec in enumerate(dataset.samples):
        entry = {
            "id": rec.id,
            "index": index,
            "q_bp": rec.q_bp,
            "category": rec.category,
            "snr_db": rec.snr_db,
            "provenance": rec.provenance or {},
        }
        if rec.alpha is not None:
            entry["alpha"] = rec.alpha
        table.append(entry)

    manifest = {
        "format_version": FORMAT_VERSION,
        "physics": dataset.physics.to_dict(),
        "sample_count": n,
        "category_histogram": category_histogram(dataset.samples),
        "arrays": arrays_meta,
        "samples": table,
    }
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest_path


def read_container(path: str | Path) -> Dataset:
    """Read a dataset directory back; bit-exact inverse of write_container."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise ContainerFormatError(f"{root}: no manifest.json")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ContainerFormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{manifest_path}: format_version {version!r}, supported {FORMAT_VERSION!r}"
        )
    physics = PhysicsConfig.from_dict(manifest["physics"])
    arrays = {}
    for name, meta in manifest.get("arrays", {}).items():
        blob_path = root / meta["file"]
        if not blob_path.exists():
            raise TruncatedFileError(f"{root}: missing blob {meta['file']}")
        arr = read_blob(blob_path)
        if list(arr.shape) != list(meta["shape"]):
            raise ContainerFormatError(
                f"{blob_path}: shape {arr.shape} disagrees with manifest {meta['shape']}"
            )
        arrays[name] = arr

    table = manifest.get("samples", [])
    if manifest.get("sample_count") != len(table):
        raise ContainerFormatError(
            f"{manifest_path}: sample_count {manifest.get('sample_count')} "
            f"disagrees with table length {len(table)}"
        )
    for name in ("truth", "scatter", "bp"):
        if name in arrays and arrays[name].shape[0] != len(table):
            raise ContainerFormatError(
                f"{root}: array {name!r} holds {arrays[name].shape[0]} records "
                f"for {len(table)} samples"
            )

    samples = []
    for entry in table:
        idx = entry["index"]
        samples.append(
            SampleRecord(
                id=entry["id"],
                truth=arrays["truth"][idx],
                scatter_noisy=arrays["scatter"][idx],
                bp=arrays["bp"][idx],
                q_bp=float(entry["q_bp"]),
                category=entry.get("category", "unassigned"),
                snr_db=float(entry["snr_db"]),
                provenance=entry.get("provenance") or {},
                etot=arrays["etot"][idx] if "etot" in arrays else None,
                alpha=float(entry["alpha"]) if "alpha" in entry else None,
            )
        )
    return Dataset(
        physics=physics,
        samples=samples,
        g_domain=arrays.get("g_domain"),
        pred=arrays.get("pred"),
    )
