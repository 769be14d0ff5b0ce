"""File formats: PBM snapshots, JSON state grids, neighbor families."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .rules import NeighborFamily


def write_pbm(path, cells: np.ndarray, binary: bool = False) -> None:
    """Write a 0/1 array as PBM; row 0 of the array (lowest y) is the bottom image row."""
    img = np.asarray(cells, dtype=np.uint8)[::-1]
    h, w = img.shape
    path = Path(path)
    if binary:
        with path.open("wb") as fh:
            fh.write(f"P4\n{w} {h}\n".encode())
            fh.write(np.packbits(img, axis=1).tobytes())
    else:
        lines = ["P1", f"{w} {h}"] + [" ".join(map(str, row)) for row in img]
        path.write_text("\n".join(lines) + "\n")


def _pbm_tokens(data: bytes):
    pos = 0
    while True:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        yield data[start:pos], pos


def read_pbm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    toks = _pbm_tokens(data)
    magic, _ = next(toks)
    if magic not in (b"P1", b"P4"):
        raise ValueError(f"not a PBM file: magic {magic!r}")
    w, _ = next(toks)
    h, pos = next(toks)
    w, h = int(w), int(h)
    if magic == b"P4":
        row = (w + 7) // 8
        raw = np.frombuffer(data[pos + 1 : pos + 1 + row * h], dtype=np.uint8)
        if raw.size != row * h:
            raise ValueError("truncated P4 data")
        img = np.unpackbits(raw.reshape(h, row), axis=1)[:, :w]
    else:
        digits = [c for c in data[pos:].decode() if c in "01"]
        if len(digits) != w * h:
            raise ValueError(f"expected {w * h} pixels, found {len(digits)}")
        img = np.array(digits, dtype=np.uint8).reshape(h, w)
    return img[::-1].copy()


def grid_to_json(cells: np.ndarray, labels=None) -> dict:
    """Rows listed top first so the JSON reads like the picture."""
    rows = np.asarray(cells)[::-1].tolist()
    if labels is not None:
        rows = [[labels[v] for v in row] for row in rows]
    return {"height": len(rows), "width": len(rows[0]) if rows else 0, "rows_top_first": rows}


def grid_from_json(data: dict, labels=None) -> np.ndarray:
    rows = data["rows_top_first"]
    if labels is not None:
        idx = {lab: i for i, lab in enumerate(labels)}
        rows = [[idx[v] for v in row] for row in rows]
    return np.array(rows, dtype=np.uint8)[::-1].copy()


def load_family(path) -> NeighborFamily:
    return NeighborFamily.from_json(json.loads(Path(path).read_text()))


def load_cells(path) -> np.ndarray:
    """Initial configuration from a PBM file or a JSON grid."""
    path = Path(path)
    if path.suffix.lower() == ".pbm":
        return read_pbm(path)
    return grid_from_json(json.loads(path.read_text()))
