"""Versioned binary artifacts with JSON sidecars.

Every binary file is ``<magic><version u16><kind header><sha256 params digest>``
followed by the payload, all little-endian.  The sidecar ``<path>.json``
holds the parameters the digest was computed from; loading recomputes the
digest and refuses files whose header, sidecar and digest disagree.

    SPHR  k u32, count u64, seed u64        count x 2k float64 (re/im interleaved)
    QPCO  N u64, p u16, q u16, flags u16    q packed upper triangles [+ N x 2 u32 origins]
    SGRF  N u64, label_len u32, label       one packed upper triangle
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .coloring import SetColoring, SphereFamily
from .errors import CorruptArtifact, UnsupportedVersion
from .geometry import from_real, to_real
from .graphs import SimpleGraph, pack_rows, unpack_rows
from .report import Report, jsonable

VERSION = 1
DIGEST_SIZE = 32
FLAG_ORIGIN = 1

_PREFIX = struct.Struct("<4sH")
_SPHR = struct.Struct("<IQQ")
_QPCO = struct.Struct("<QHHH")
_SGRF = struct.Struct("<QI")


def params_digest(params: dict) -> bytes:
    blob = json.dumps(jsonable(params), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).digest()


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _write(path, magic: bytes, header: bytes, params: dict, payload: list, kind: str):
    digest = params_digest(params)
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(magic, VERSION))
        fh.write(header)
        fh.write(digest)
        for chunk in payload:
            fh.write(chunk)
    side = {"kind": kind, "version": VERSION, "params": jsonable(params), "digest": digest.hex()}
    sidecar_path(path).write_text(json.dumps(side, sort_keys=True, indent=2) + "\n", encoding="utf-8")


class _Reader:
    def __init__(self, path, magic: bytes):
        self.data = Path(path).read_bytes()
        self.pos = 0
        got, version = self.unpack(_PREFIX)
        if got != magic:
            raise CorruptArtifact(f"bad magic {got!r}, expected {magic!r}")
        if version != VERSION:
            raise UnsupportedVersion(f"unsupported version {version}")
        self.path = Path(path)

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise CorruptArtifact(f"truncated payload in {self.path}")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out

    def unpack(self, st: struct.Struct):
        return st.unpack(self.take(st.size))

    def digest_and_params(self, kind: str) -> dict:
        digest = self.take(DIGEST_SIZE)
        side = sidecar_path(self.path)
        if not side.exists():
            raise CorruptArtifact(f"missing sidecar {side}")
        meta = json.loads(side.read_text(encoding="utf-8"))
        if meta.get("kind") != kind:
            raise CorruptArtifact(f"sidecar kind {meta.get('kind')!r} != {kind!r}")
        if params_digest(meta["params"]) != digest or meta.get("digest") != digest.hex():
            raise CorruptArtifact("digest mismatch between header and sidecar")
        return meta["params"]

    def finish(self):
        if self.pos != len(self.data):
            raise CorruptArtifact(f"{len(self.data) - self.pos} trailing bytes in {self.path}")


def _triu_bytes(bits: np.ndarray, n: int) -> bytes:
    dense = unpack_rows(bits, n)
    return np.packbits(dense[np.triu(np.ones((n, n), dtype=bool), k=1)], bitorder="little").tobytes()


def _from_triu(raw: bytes, n: int) -> np.ndarray:
    mask = np.triu(np.ones((n, n), dtype=bool), k=1)
    flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=int(mask.sum()), bitorder="little")
    dense = np.zeros((n, n), dtype=bool)
    dense[mask] = flat.astype(bool)
    # symmetry is enforced by reconstruction
    return pack_rows(dense | dense.T)


def _triu_size(n: int) -> int:
    return (n * (n - 1) // 2 + 7) // 8


# points / families ----------------------------------------------------------

def save_points(path, points: np.ndarray, seed: int, params: dict | None = None):
    pts = np.asarray(points, dtype=np.complex128)
    count, k = pts.shape
    params = dict(params or {}, k=k, count=count, seed=seed)
    _write(path, b"SPHR", _SPHR.pack(k, count, seed), params,
           [to_real(pts).astype("<f8").tobytes()], "points")


def load_points(path) -> tuple[np.ndarray, dict]:
    rd = _Reader(path, b"SPHR")
    k, count, seed = rd.unpack(_SPHR)
    params = rd.digest_and_params("points")
    if (params.get("k"), params.get("count"), params.get("seed")) != (k, count, seed):
        raise CorruptArtifact("header fields disagree with sidecar")
    real = np.frombuffer(rd.take(count * 2 * k * 8), dtype="<f8").reshape(count, 2 * k)
    rd.finish()
    return from_real(real.astype(np.float64)), params


def save_family(path, family: SphereFamily):
    save_points(path, family.all_points(), family.seed, family.params())


def load_family(path) -> SphereFamily:
    pts, params = load_points(path)
    splits = np.cumsum(params["sizes"])[:-1]
    return SphereFamily(params["p"], params["q"], params["k"], np.split(pts, splits),
                        params["eta"], params["seed"], params.get("mode", "sampled"))


# colorings --------------------------------------------------------------------

def _coloring_params(c: SetColoring) -> dict:
    # family params may carry their own p, q (complemented stage), so nest them
    return {"header": {"N": c.n, "p": c.p, "q": c.q}, "params": c.params}


def save_coloring(path, coloring: SetColoring):
    n = coloring.n
    flags = FLAG_ORIGIN if coloring.vertex_origin is not None else 0
    payload = [_triu_bytes(bits, n) for bits in coloring.colors]
    if flags & FLAG_ORIGIN:
        payload.append(np.asarray(coloring.vertex_origin, dtype="<u4").tobytes())
    _write(path, b"QPCO", _QPCO.pack(n, coloring.p, coloring.q, flags),
           _coloring_params(coloring), payload, "coloring")


def load_coloring(path) -> SetColoring:
    rd = _Reader(path, b"QPCO")
    n, p, q, flags = rd.unpack(_QPCO)
    params = rd.digest_and_params("coloring")
    if params.get("header") != {"N": n, "p": p, "q": q}:
        raise CorruptArtifact("header fields disagree with sidecar")
    colors = [_from_triu(rd.take(_triu_size(n)), n) for _ in range(q)]
    origin = None
    if flags & FLAG_ORIGIN:
        origin = np.frombuffer(rd.take(n * 8), dtype="<u4").reshape(n, 2).astype(np.int64)
    rd.finish()
    return SetColoring(n, p, q, colors, origin, params["params"])


# graphs -----------------------------------------------------------------------

def save_graph(path, g: SimpleGraph, params: dict | None = None):
    label = g.label.encode("utf-8")
    params = dict(params or {}, N=g.n, label=g.label)
    _write(path, b"SGRF", _SGRF.pack(g.n, len(label)) + label, params,
           [_triu_bytes(g.bits, g.n)], "graph")


def load_graph(path) -> SimpleGraph:
    rd = _Reader(path, b"SGRF")
    n, label_len = rd.unpack(_SGRF)
    label = rd.take(label_len).decode("utf-8")
    params = rd.digest_and_params("graph")
    if (params.get("N"), params.get("label")) != (n, label):
        raise CorruptArtifact("header fields disagree with sidecar")
    bits = _from_triu(rd.take(_triu_size(n)), n)
    rd.finish()
    return SimpleGraph(n, bits, label)


# reports ----------------------------------------------------------------------

def save_report(path, report: Report, include_meta: bool = True):
    Path(path).write_text(report.to_json(include_meta), encoding="utf-8")


def load_report(path) -> Report:
    return Report.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
