"""ispds-1 dataset container access.

Self-contained reader/writer for the shared on-disk format: a directory
with manifest.json plus one binary tensor blob per array. Blob layout:
4-byte magic "ISPT", 1-byte dtype code (1 = float32, 2 = complex64),
1-byte rank, 2 reserved zero bytes, rank x 8-byte little-endian dims,
row-major little-endian payload.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_VERSION = "ispds-1"
MAGIC = b"ISPT"
_DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<c8")}
_CODES = {np.dtype("<f4"): 1, np.dtype("<c8"): 2}


class ContainerError(RuntimeError):
    """Container violates the ispds-1 contract."""


def read_blob(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < 8 or data[:4] != MAGIC:
        raise ContainerError(f"{path}: not an ISPT blob")
    code, rank, _reserved = struct.unpack("<BBH", data[4:8])
    if code not in _DTYPES:
        raise ContainerError(f"{path}: unknown dtype code {code}")
    dims = struct.unpack(f"<{rank}Q", data[8 : 8 + 8 * rank])
    dtype = _DTYPES[code]
    payload = data[8 + 8 * rank :]
    expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize if rank else dtype.itemsize
    if len(payload) != expected:
        raise ContainerError(f"{path}: payload {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype=dtype).reshape(dims).copy()


def write_blob(path: Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array)
    if arr.dtype not in _CODES:
        raise ContainerError(f"blob dtype must be float32/complex64, got {arr.dtype}")
    header = MAGIC + struct.pack("<BBH", _CODES[arr.dtype], arr.ndim, 0)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    path.write_bytes(header + dims + arr.tobytes())


@dataclass
class SampleMeta:
    id: str
    index: int
    q_bp: float
    category: str
    snr_db: float
    alpha: float | None = None
    provenance: dict = field(default_factory=dict)


@dataclass
class DataBundle:
    """Arrays and metadata of one container."""

    physics: dict
    samples: list[SampleMeta]
    truth: np.ndarray  # (n, grid, grid) float32
    bp: np.ndarray  # (n, grid, grid) complex64
    scatter: np.ndarray  # (n, n_rx, n_tx) complex64
    etot: np.ndarray | None = None  # (n, n_tx, grid, grid) complex64
    g_domain: np.ndarray | None = None  # (n_cells, n_cells) complex64
    pred: np.ndarray | None = None

    @property
    def grid_n(self) -> int:
        return int(self.truth.shape[-1])

    def __len__(self) -> int:
        return len(self.samples)


def load_container(path: str | Path) -> DataBundle:
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise ContainerError(f"{root}: missing manifest.json")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ContainerError(
            f"{root}: format_version {manifest.get('format_version')!r}, "
            f"supported {FORMAT_VERSION!r}"
        )
    arrays = {}
    for name, meta in manifest.get("arrays", {}).items():
        arrays[name] = read_blob(root / meta["file"])
    samples = [
        SampleMeta(
            id=entry["id"],
            index=entry["index"],
            q_bp=float(entry["q_bp"]),
            category=entry.get("category", "unassigned"),
            snr_db=float(entry["snr_db"]),
            alpha=float(entry["alpha"]) if "alpha" in entry else None,
            provenance=entry.get("provenance") or {},
        )
        for entry in manifest.get("samples", [])
    ]
    if len(samples) != manifest.get("sample_count"):
        raise ContainerError(f"{root}: sample table and sample_count disagree")
    for required in ("truth", "bp", "scatter"):
        if required not in arrays:
            raise ContainerError(f"{root}: array {required!r} missing")
    return DataBundle(
        physics=manifest.get("physics", {}),
        samples=samples,
        truth=arrays["truth"],
        bp=arrays["bp"],
        scatter=arrays["scatter"],
        etot=arrays.get("etot"),
        g_domain=arrays.get("g_domain"),
        pred=arrays.get("pred"),
    )


def write_prediction_container(
    source: DataBundle, predictions: np.ndarray, path: str | Path
) -> None:
    """Write a container holding predictions next to the source sample table."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    pred = np.ascontiguousarray(predictions, dtype="<f4")
    if pred.shape != source.truth.shape:
        raise ContainerError(
            f"predictions {pred.shape} do not match source truths {source.truth.shape}"
        )
    arrays = {
        "truth": source.truth.astype("<f4"),
        "bp": source.bp.astype("<c8"),
        "scatter": source.scatter.astype("<c8"),
        "pred": pred,
    }
    files = {"truth": "truth.ispt", "bp": "bp.ispt", "scatter": "scatter.ispt", "pred": "pred.ispt"}
    meta = {}
    for name, arr in arrays.items():
        write_blob(root / files[name], arr)
        meta[name] = {
            "file": files[name],
            "dtype": "float32" if arr.dtype == np.dtype("<f4") else "complex64",
            "shape": list(arr.shape),
            "header_bytes": 8 + 8 * arr.ndim,
            "record_bytes": int(np.prod(arr.shape[1:], dtype=np.uint64)) * arr.dtype.itemsize,
        }
    table = []
    histogram: dict[str, int] = {}
    for s in source.samples:
        entry = {
            "id": s.id,
            "index": s.index,
            "q_bp": s.q_bp,
            "category": s.category,
            "snr_db": s.snr_db,
            "provenance": s.provenance,
        }
        if s.alpha is not None:
            entry["alpha"] = s.alpha
        table.append(entry)
        histogram[s.category] = histogram.get(s.category, 0) + 1
    manifest = {
        "format_version": FORMAT_VERSION,
        "physics": source.physics,
        "sample_count": len(table),
        "category_histogram": histogram,
        "arrays": meta,
        "samples": table,
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
