"""File formats: raw little-endian float32 payloads with JSON sidecars.

Every artifact is two files: ``<path>`` holding the raw ``f32le`` payload
(complex data interleaved re,im as a trailing axis of 2) and
``<path>.meta.json`` describing version, kind, dims, the producing scene or
grid, and the provenance command line. Writes go through a temp file and an
atomic rename so readers never observe partial files.
"""

from __future__ import annotations

import base64
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .beamform import BeamformedStack, ScalarImage
from .domain import (AberratorProfile, ImageGrid, MediumConfig, Scene,
                     SequenceConfig, TransducerConfig, validate_scene)
from .dpc import CModeImage, DpcImage, FocusMap
from .synth import RfDataset

FORMAT_VERSION = 1
KINDS = ("rf", "cimg", "img", "focusmap")


class FileFormatError(RuntimeError):
    """Raised on size mismatches, unknown versions or missing sidecars."""


@dataclass
class SidecarHeader:
    kind: str
    dims: list
    meta: dict = field(default_factory=dict)
    provenance: str = ""
    version: int = FORMAT_VERSION
    dtype: str = "f32le"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FileFormatError(f"unknown dataset kind: {self.kind!r}")
        if self.version != FORMAT_VERSION:
            raise FileFormatError(f"unsupported format version: {self.version}")
        if self.dtype != "f32le":
            raise FileFormatError(f"unsupported dtype: {self.dtype!r}")


def sidecar_path(path: str) -> str:
    return path + ".meta.json"


def _atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-dpcus-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_dataset(path: str, payload: np.ndarray, header: SidecarHeader) -> None:
    """Store a float payload as raw f32le plus its JSON sidecar."""
    flat = np.ascontiguousarray(payload, dtype="<f4")
    if list(flat.shape) != list(header.dims):
        raise FileFormatError(
            f"payload shape {flat.shape} does not match header dims {header.dims}")
    _atomic_write(path, flat.tobytes())
    doc = {"version": header.version, "kind": header.kind,
           "dtype": header.dtype, "dims": list(header.dims),
           "meta": header.meta, "provenance": header.provenance}
    _atomic_write(sidecar_path(path), json.dumps(doc, indent=1).encode())


def read_dataset(path: str) -> tuple:
    """Load (payload float32 array, SidecarHeader); bit-exact round trip."""
    meta_file = sidecar_path(path)
    if not os.path.exists(meta_file):
        raise FileFormatError(f"missing sidecar: {meta_file}")
    with open(meta_file, "rb") as f:
        doc = json.loads(f.read())
    header = SidecarHeader(kind=doc["kind"], dims=doc["dims"],
                           meta=doc.get("meta", {}),
                           provenance=doc.get("provenance", ""),
                           version=doc["version"], dtype=doc["dtype"])
    with open(path, "rb") as f:
        raw = f.read()
    n = int(np.prod(header.dims))
    if len(raw) != 4 * n:
        raise FileFormatError(
            f"payload size {len(raw)} does not match dims {header.dims} "
            f"({4 * n} bytes expected)")
    arr = np.frombuffer(raw, dtype="<f4").reshape(header.dims)
    return arr, header


# ---------------------------------------------------------------------------
# Scene / profile <-> JSON dicts
# ---------------------------------------------------------------------------

def profile_to_dict(p: AberratorProfile) -> dict:
    return {"depth": p.depth, "xs": [float(v) for v in p.xs],
            "delays": [float(v) for v in p.delays], "label": p.label}


def profile_from_dict(d: dict) -> AberratorProfile:
    if "xs" in d:
        xs = np.asarray(d["xs"], dtype=float)
    else:  # compact uniform form for hand-written files
        xs = d["x0"] + d["dx"] * np.arange(int(d["n"]))
    return AberratorProfile(d["depth"], xs, np.asarray(d["delays"], dtype=float),
                            label=d.get("label", ""))


def scene_to_dict(scene: Scene) -> dict:
    tr, seq, g = scene.transducer, scene.sequence, scene.grid
    doc = {
        "transducer": {"n_elements": tr.n_elements, "pitch": tr.pitch,
                       "f0": tr.f0, "bandwidth_sigma": tr.bandwidth_sigma,
                       "fs": tr.fs, "element_x0": tr.element_x0},
        "sequence": {"angles_rad": list(seq.angles), "m": seq.m},
        "medium": {"c": scene.medium.c},
        "grid": {"x0": g.x0, "dx": g.dx, "nx": g.nx,
                 "z0": g.z0, "dz": g.dz, "nz": g.nz},
    }
    if scene.aberrator is not None:
        doc["aberrator"] = profile_to_dict(scene.aberrator)
    return doc


def scene_from_dict(doc: dict) -> Scene:
    tr = TransducerConfig(**doc["transducer"])
    seq_doc = dict(doc["sequence"])
    if "angles_deg" in seq_doc:
        angles = tuple(np.radians(seq_doc.pop("angles_deg")))
    else:
        angles = tuple(seq_doc.pop("angles_rad"))
    seq = SequenceConfig(angles, m=int(seq_doc.get("m", 1)))
    medium = MediumConfig(**doc["medium"])
    grid = ImageGrid(**doc["grid"])
    ab = None
    if doc.get("aberrator"):
        ab = profile_from_dict(doc["aberrator"])
    return validate_scene(tr, seq, medium, grid, ab)


def _grid_meta(g: ImageGrid) -> dict:
    return {"x0": g.x0, "dx": g.dx, "nx": g.nx, "z0": g.z0, "dz": g.dz, "nz": g.nz}


def _mask_meta(valid: np.ndarray) -> dict:
    """Compact encoding of the validity mask: per-column [lo, hi) runs when
    each column is a single run (the shear case), else packed bits."""
    nx, nz = valid.shape
    runs = []
    single = True
    for iz in range(nz):
        col = valid[:, iz]
        on = np.flatnonzero(col)
        if on.size == 0:
            runs.append([0, 0])
        elif on[-1] - on[0] + 1 == on.size:
            runs.append([int(on[0]), int(on[-1]) + 1])
        else:
            single = False
            break
    if single:
        return {"valid_runs": runs}
    packed = np.packbits(valid.astype(np.uint8))
    return {"valid_bits": base64.b64encode(packed.tobytes()).decode()}


def _mask_from_meta(meta: dict, shape: tuple) -> np.ndarray:
    if "valid_runs" in meta:
        mask = np.zeros(shape, dtype=bool)
        for iz, (lo, hi) in enumerate(meta["valid_runs"]):
            mask[lo:hi, iz] = True
        return mask
    if "valid_bits" in meta:
        packed = np.frombuffer(base64.b64decode(meta["valid_bits"]), dtype=np.uint8)
        flat = np.unpackbits(packed)[: shape[0] * shape[1]]
        return flat.reshape(shape).astype(bool)
    return np.ones(shape, dtype=bool)


# ---------------------------------------------------------------------------
# Artifact save / load
# ---------------------------------------------------------------------------

def save_rf(path: str, rf: RfDataset, provenance: str = "") -> None:
    header = SidecarHeader("rf", list(rf.samples.shape),
                           meta={"t0": rf.t0, "scene": scene_to_dict(rf.scene)},
                           provenance=provenance)
    write_dataset(path, rf.samples, header)


def load_rf(path: str) -> RfDataset:
    arr, header = read_dataset(path)
    if header.kind != "rf":
        raise FileFormatError(f"expected rf dataset, got {header.kind!r}")
    scene = scene_from_dict(header.meta["scene"])
    return RfDataset(arr.astype(float), float(header.meta["t0"]), scene)


def save_stack(path: str, stack: BeamformedStack, provenance: str = "") -> None:
    inter = np.stack([stack.images.real, stack.images.imag], axis=-1)
    header = SidecarHeader("cimg", list(inter.shape),
                           meta={"grid": _grid_meta(stack.grid),
                                 "scene": scene_to_dict(stack.scene)},
                           provenance=provenance)
    write_dataset(path, inter, header)


def load_stack(path: str) -> BeamformedStack:
    arr, header = read_dataset(path)
    if header.kind != "cimg":
        raise FileFormatError(f"expected complex stack, got {header.kind!r}")
    scene = scene_from_dict(header.meta["scene"])
    images = arr[..., 0].astype(float) + 1j * arr[..., 1].astype(float)
    return BeamformedStack(images, ImageGrid(**header.meta["grid"]), scene)


def save_image(path: str, img, provenance: str = "") -> None:
    """Persist a ScalarImage or DpcImage (kind "img")."""
    meta = {"grid": _grid_meta(img.grid)}
    meta.update(_mask_meta(img.valid))
    if isinstance(img, DpcImage):
        meta.update({"z_s": img.z_s, "m": img.m, "image_role": "dpc",
                     "dpc_provenance": img.provenance})
    else:
        meta["image_role"] = "scalar"
    header = SidecarHeader("img", list(img.values.shape), meta=meta,
                           provenance=provenance)
    write_dataset(path, img.values, header)


def load_image(path: str):
    arr, header = read_dataset(path)
    if header.kind != "img":
        raise FileFormatError(f"expected image, got {header.kind!r}")
    grid = ImageGrid(**header.meta["grid"])
    valid = _mask_from_meta(header.meta, grid.shape)
    vals = arr.astype(float)
    if header.meta.get("image_role") == "dpc":
        return DpcImage(vals, grid, float(header.meta["z_s"]),
                        int(header.meta["m"]),
                        header.meta.get("dpc_provenance", "pipeline"),
                        valid=valid)
    return ScalarImage(vals, grid, valid=valid)


def save_focusmap(path: str, fmap: FocusMap, provenance: str = "") -> None:
    header = SidecarHeader("focusmap", list(fmap.rows.shape),
                           meta={"grid": _grid_meta(fmap.grid),
                                 "row_axis": "z_s",
                                 "row_coords": [float(v) for v in fmap.zs_list]},
                           provenance=provenance)
    write_dataset(path, fmap.rows, header)


def load_focusmap(path: str) -> FocusMap:
    arr, header = read_dataset(path)
    if header.kind != "focusmap":
        raise FileFormatError(f"expected focus map, got {header.kind!r}")
    return FocusMap(arr.astype(float), np.asarray(header.meta["row_coords"]),
                    ImageGrid(**header.meta["grid"]))


def save_cmode(path: str, cmode: CModeImage, grid: ImageGrid,
               provenance: str = "") -> None:
    """C-mode rows share the focusmap layout with y as the row axis."""
    header = SidecarHeader("focusmap", list(cmode.values.shape),
                           meta={"grid": _grid_meta(grid), "row_axis": "y",
                                 "row_coords": [float(v) for v in cmode.ys],
                                 "z_s": cmode.z_s},
                           provenance=provenance)
    write_dataset(path, cmode.values, header)


# ---------------------------------------------------------------------------
# Plain-text exports
# ---------------------------------------------------------------------------

def export_pgm(path: str, values: np.ndarray, clip_pct: float = 99.0) -> None:
    """8-bit PGM with symmetric signed colormapping: 0 -> mid-gray, +-clip ->
    white/black, clip at the given percentile of |values|."""
    v = np.asarray(values, dtype=float)
    clip = np.percentile(np.abs(v), clip_pct)
    if clip == 0.0:
        clip = 1.0
    scaled = np.clip(v / clip, -1.0, 1.0)
    img8 = np.round((scaled + 1.0) * 127.5).astype(np.uint8)
    # payload is [nx, nz]; PGM rasters rows top-down, so depth becomes rows
    raster = img8.T
    headline = f"P5\n{raster.shape[1]} {raster.shape[0]}\n255\n".encode()
    _atomic_write(path, headline + raster.tobytes())


def export_csv(path: str, values: np.ndarray) -> None:
    buf = "\n".join(",".join(f"{v:.9g}" for v in row) for row in
                    np.asarray(values, dtype=float)) + "\n"
    _atomic_write(path, buf.encode())
