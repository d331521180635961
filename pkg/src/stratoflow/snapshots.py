"""Binary snapshot container and diagnostics CSV.

Layout (all multi-byte values little-endian):

    offset 0   magic     8 bytes  b"LAYRFLOW"
    offset 8   version   uint32   currently 1
    offset 12  n1        uint32
    offset 16  n2        uint32
    offset 20  n3        uint32
    offset 24  time      float64
    offset 32  omega     (n3+1)*n2*n1 float64, C order (x1 fastest)
    ...        u_mean    (n3+1)*2 float64, node-major

The reader validates every header field and reports the byte offset of the
first inconsistency.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .solver.grid import LayeredGrid
from .solver.stepping import LayeredState

__all__ = ["MAGIC", "VERSION", "write_snapshot", "read_snapshot"]

MAGIC = b"LAYRFLOW"
VERSION = 1
_HEADER = struct.Struct("<8sIIIId")


def write_snapshot(path: str | Path, grid: LayeredGrid, state: LayeredState) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, grid.n1, grid.n2, grid.n3, state.t))
        f.write(np.ascontiguousarray(state.omega, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(state.u_mean, dtype="<f8").tobytes())
    tmp.replace(path)


def read_snapshot(path: str | Path) -> tuple[LayeredGrid, LayeredState]:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(len(raw), "file truncated inside the header")
    magic, version, n1, n2, n3, t = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise SnapshotFormatError(0, f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(8, f"unsupported version {version}")
    try:
        grid = LayeredGrid(n1=n1, n2=n2, n3=n3)
    except Exception as exc:
        raise SnapshotFormatError(12, f"inadmissible grid dims ({n1}, {n2}, {n3}): {exc}")
    n_omega = (n3 + 1) * n2 * n1
    n_mean = (n3 + 1) * 2
    expected = _HEADER.size + 8 * (n_omega + n_mean)
    if len(raw) != expected:
        raise SnapshotFormatError(
            min(len(raw), expected), f"expected {expected} bytes, found {len(raw)}"
        )
    body = np.frombuffer(raw, dtype="<f8", count=n_omega + n_mean, offset=_HEADER.size)
    omega = body[:n_omega].reshape(grid.shape).astype(float)
    u_mean = body[n_omega:].reshape(n3 + 1, 2).astype(float)
    return grid, LayeredState(t=float(t), omega=omega, u_mean=u_mean)
