"""Rectangular grids over a group and kernels sampled on them.

Axes follow the FFT-aligned convention x_j = -E + j h with h = 2E/n, so the
origin is a grid point and differences of grid values stay on the grid
(needed by the convolution fast paths).  Quadrature is the uniform rule,
which is trapezoid-accurate for the rapidly decaying integrands used here.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .groups import GroupDescriptor, abelian_group, heisenberg_group

__all__ = ["GridSpec", "SampledKernel", "line_grid", "h1_grid"]

MAX_POINTS = 2 ** 24


@dataclass(frozen=True)
class GridSpec:
    group: GroupDescriptor
    extents: tuple          # per-axis half width E_k
    counts: tuple           # per-axis point count n_k

    def __post_init__(self):
        if len(self.extents) != self.group.n or len(self.counts) != self.group.n:
            raise ValueError("extents/counts must match group dimension")
        if any(e <= 0 for e in self.extents) or any(c < 4 for c in self.counts):
            raise ValueError("extents must be positive and counts >= 4")
        if int(np.prod(self.counts)) > MAX_POINTS:
            raise ValueError(f"grid exceeds {MAX_POINTS} points")

    @property
    def spacings(self) -> tuple:
        return tuple(2.0 * e / c for e, c in zip(self.extents, self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def axis(self, k: int) -> np.ndarray:
        e, c = self.extents[k], self.counts[k]
        return np.linspace(-e, e, c, endpoint=False)

    def axes(self):
        return [self.axis(k) for k in range(self.group.n)]

    def points(self) -> np.ndarray:
        """All grid points as an (N, n) array in C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def sample(self, fn) -> "SampledKernel":
        mesh = self.meshgrid()
        return SampledKernel(grid=self, values=np.asarray(fn(*mesh), dtype=float))

    def to_dict(self):
        g = self.group
        return {
            "group": g.name,
            "n": g.n,
            "weights": list(g.weights),
            "n1": g.n1,
            "structure": g.structure.tolist(),
            "extents": list(self.extents),
            "counts": list(self.counts),
        }

    @staticmethod
    def from_dict(d) -> "GridSpec":
        from .groups import GroupDescriptor

        g = GroupDescriptor(
            name=d["group"], n=int(d["n"]), weights=tuple(d["weights"]),
            n1=int(d["n1"]), structure=np.asarray(d["structure"], dtype=float),
        )
        return GridSpec(group=g, extents=tuple(d["extents"]), counts=tuple(d["counts"]))


@dataclass
class SampledKernel:
    grid: GridSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != tuple(self.grid.counts):
            raise ValueError("values shape must match grid counts")

    def integral(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)

    def l2_norm(self) -> float:
        return float(np.sqrt((self.values ** 2).sum() * self.grid.cell_volume))

    def linf_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def inner(self, other: "SampledKernel") -> float:
        if other.grid.counts != self.grid.counts:
            raise ValueError("grid mismatch")
        return float((self.values * other.values).sum() * self.grid.cell_volume)

    def reflected(self) -> "SampledKernel":
        """psi~(x) = conj(psi)(x^{-1}); real kernels: value at -x.

        On the FFT-aligned grid -x is a grid point except on the extreme
        slice, which wraps; kernels are required to be negligible there.
        """
        vals = self.values
        for ax in range(vals.ndim):
            vals = np.roll(np.flip(vals, axis=ax), 1, axis=ax)
        return SampledKernel(grid=self.grid, values=vals, meta=dict(self.meta))

    # -- serialization -----------------------------------------------------

    def save(self, path):
        raw = self.values.astype("<f8").tobytes()
        header = {
            "format": "stratawave-kernel-1",
            "grid": self.grid.to_dict(),
            "meta": self.meta,
            "dtype": "<f8",
            "sha256": hashlib.sha256(raw).hexdigest(),
        }
        htxt = json.dumps(header, indent=1).encode()
        with open(path, "wb") as fh:
            fh.write(len(htxt).to_bytes(8, "little"))
            fh.write(htxt)
            fh.write(raw)

    @staticmethod
    def load(path) -> "SampledKernel":
        with open(path, "rb") as fh:
            hlen = int.from_bytes(fh.read(8), "little")
            header = json.loads(fh.read(hlen).decode())
            raw = fh.read()
        if header.get("format") != "stratawave-kernel-1":
            raise ValueError("not a stratawave kernel file")
        if hashlib.sha256(raw).hexdigest() != header["sha256"]:
            raise ValueError("kernel file checksum mismatch")
        grid = GridSpec.from_dict(header["grid"])
        vals = np.frombuffer(raw, dtype="<f8").reshape(grid.counts)
        return SampledKernel(grid=grid, values=vals.copy(), meta=header.get("meta", {}))

    def export_csv_slice(self, path, axis: int = 0):
        """Write the 1-D slice through the origin along ``axis`` as CSV."""
        idx = []
        for k, c in enumerate(self.grid.counts):
            idx.append(slice(None) if k == axis else c // 2)
        sl = self.values[tuple(idx)]
        xs = self.grid.axis(axis)
        with open(path, "w") as fh:
            fh.write("coordinate,value\n")
            for xv, vv in zip(xs, sl):
                fh.write(f"{xv:.10g},{vv:.10g}\n")


def line_grid(extent: float = 20.0, count: int = 4096) -> GridSpec:
    return GridSpec(group=abelian_group(1), extents=(extent,), counts=(count,))


def h1_grid(extent_xy: float = 8.0, extent_u: float = 10.0, count: int = 96,
            count_u: int = None) -> GridSpec:
    return GridSpec(
        group=heisenberg_group(),
        extents=(extent_xy, extent_xy, extent_u),
        counts=(count, count, count_u or count),
    )
