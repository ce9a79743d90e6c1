"""HTTP service wrapping a loaded beamformed stack for interactive use.

The shear depth, pair separation and filtering are steered per request and
recomputed on the fly (shear + compounding is cheap enough for slider-rate
interaction); beamforming itself is precomputed. Responses are pure
functions of (loaded stack, request parameters), so identical requests yield
identical bytes, byte-for-byte equal to the CLI ``dpc`` output.

Binary image payloads are raw little-endian float32 with the array dims in
an ``X-Dims`` header; colormapping is the client's job.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

import numpy as np

from . import io as dio
from .beamform import BeamformedStack, ScalarImage, compound_bmode
from .cli import dpc_stage
from .domain import SceneError
from .dpc import focus_map, roi_mean_abs

MIME = {".html": "text/html", ".js": "text/javascript", ".css": "text/css",
        ".map": "application/json", ".ico": "image/x-icon"}


@dataclass
class SessionState:
    """Immutable view of the loaded data; replaced atomically as a whole."""

    stack: Optional[BeamformedStack] = None
    ref_stack: Optional[BeamformedStack] = None
    bmode: Optional[ScalarImage] = None


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def _f32_bytes(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype="<f4").tobytes()


class DpcRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    # -- plumbing ----------------------------------------------------------
    def log_message(self, fmt, *args):
        if self.server.verbose:
            super().log_message(fmt, *args)

    def _session(self) -> SessionState:
        state = self.server.session
        if state.stack is None:
            raise ApiError(409, "no stack loaded")
        return state

    def _send(self, status: int, body: bytes, content_type: str,
              headers: Optional[dict] = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        for k, v in (headers or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, doc: dict):
        self._send(status, json.dumps(doc).encode(), "application/json")

    def _send_image(self, values: np.ndarray, extra: Optional[dict] = None):
        headers = {"X-Dims": ",".join(str(d) for d in values.shape)}
        headers.update(extra or {})
        self._send(200, _f32_bytes(values), "application/octet-stream", headers)

    def _fail(self, err: ApiError):
        self._send_json(err.status, {"error": str(err)})

    # -- endpoints ---------------------------------------------------------
    def do_GET(self):
        path = self.path.split("?")[0]
        try:
            if path == "/api/meta":
                self._meta()
            elif path == "/api/bmode":
                self._bmode()
            elif path == "/api/focusmap":
                self._focusmap()
            else:
                self._static(path)
        except ApiError as e:
            self._fail(e)
        except (SceneError, ValueError) as e:
            self._fail(ApiError(422, str(e)))

    def do_POST(self):
        try:
            if self.path.split("?")[0] != "/api/dpc":
                raise ApiError(404, "unknown endpoint")
            self._dpc()
        except ApiError as e:
            self._fail(e)
        except (SceneError, ValueError) as e:
            self._fail(ApiError(422, str(e)))

    def _meta(self):
        state = self._session()
        scene = state.stack.scene
        g = state.stack.grid
        seq = scene.sequence
        self._send_json(200, {
            "angles_rad": list(seq.angles),
            "n_angles": seq.n_angles,
            "m_max": seq.n_angles - 1,
            "grid": {"x0": g.x0, "dx": g.dx, "nx": g.nx,
                     "z0": g.z0, "dz": g.dz, "nz": g.nz},
            "z_range": [g.z0, g.z_max],
            "c": scene.medium.c,
            "f0": scene.transducer.f0,
            "lambda0": scene.lambda0,
            "has_reference": state.ref_stack is not None,
        })

    def _bmode(self):
        state = self._session()
        self._send_image(state.bmode.values)

    def _focusmap(self):
        state = self._session()
        query = self.path.partition("?")[2]
        params = dict(p.split("=", 1) for p in query.split("&") if "=" in p)
        k = int(params.get("n", "24"))
        m = int(params.get("m", "1"))
        if k < 1:
            raise ApiError(422, "n must be >= 1")
        g = state.stack.grid
        zs = np.linspace(g.z0, g.z_max, k) if k > 1 else np.array([g.z0])
        fmap = focus_map(state.stack, m, zs)
        self._send_image(fmap.rows, {
            "X-Zs-List": ",".join(f"{z:.17g}" for z in fmap.zs_list)})

    def _dpc(self):
        state = self._session()
        length = int(self.headers.get("Content-Length", "0"))
        try:
            doc = json.loads(self.rfile.read(length) or b"{}")
        except json.JSONDecodeError as e:
            raise ApiError(422, f"bad JSON body: {e}")
        g = state.stack.grid
        seq = state.stack.scene.sequence
        z_s = float(doc.get("z_s_m", g.z0))
        m = int(doc.get("m", 1))
        sigma = float(doc.get("filter_sigma_m", 0.0))
        ref_correct = bool(doc.get("ref_correct", False))
        enhance_p = int(doc.get("enhance_p", 0))
        if not (g.z0 <= z_s <= g.z_max):
            raise ApiError(422, "z_s outside grid depth range")
        if not (1 <= m <= seq.n_angles - 1):
            raise ApiError(422, "m outside [1, N-1]")
        if sigma < 0:
            raise ApiError(422, "filter sigma must be >= 0")
        if enhance_p and (enhance_p < 1 or enhance_p % 2 == 0):
            raise ApiError(422, "enhance_p must be 0 or odd")
        if ref_correct and state.ref_stack is None:
            raise ApiError(422, "no reference stack loaded")
        img = dpc_stage(state.stack, z_s, m, sigma,
                        ref_stack=state.ref_stack if ref_correct else None,
                        enhance_p=enhance_p)
        extra = {"X-Zs-M": f"{z_s:.9g}", "X-M": str(m)}
        if "roi" in doc and doc["roi"] is not None:
            roi = tuple(float(v) for v in doc["roi"])
            extra["X-Roi-Mean-Abs"] = f"{roi_mean_abs(img, roi):.9g}"
        self._send_image(img.values, extra)

    def _static(self, path: str):
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            raise ApiError(404, "no UI bundled")
        rel = "index.html" if path == "/" else path.lstrip("/")
        full = os.path.realpath(os.path.join(ui_dir, rel))
        if not full.startswith(os.path.realpath(ui_dir) + os.sep) \
                and full != os.path.realpath(ui_dir):
            raise ApiError(404, "not found")
        if not os.path.isfile(full):
            raise ApiError(404, "not found")
        ext = os.path.splitext(full)[1]
        with open(full, "rb") as f:
            self._send(200, f.read(), MIME.get(ext, "application/octet-stream"))


class DpcServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, ui_dir: Optional[str] = None, verbose: bool = False):
        super().__init__(addr, DpcRequestHandler)
        self.session = SessionState()
        self.ui_dir = ui_dir
        self.verbose = verbose
        self._load_lock = threading.Lock()

    def load(self, stack_path: Optional[str] = None,
             ref_path: Optional[str] = None) -> None:
        """Replace the session atomically; in-flight requests keep the old one."""
        with self._load_lock:
            stack = dio.load_stack(stack_path) if stack_path else None
            ref = dio.load_stack(ref_path) if ref_path else None
            bmode = compound_bmode(stack) if stack is not None else None
            self.session = SessionState(stack=stack, ref_stack=ref, bmode=bmode)

    def set_session(self, stack: Optional[BeamformedStack],
                    ref_stack: Optional[BeamformedStack] = None) -> None:
        with self._load_lock:
            bmode = compound_bmode(stack) if stack is not None else None
            self.session = SessionState(stack=stack, ref_stack=ref_stack,
                                        bmode=bmode)


def make_server(host: str = "127.0.0.1", port: int = 0,
                stack_path: Optional[str] = None,
                ref_path: Optional[str] = None,
                ui_dir: Optional[str] = None,
                verbose: bool = False) -> DpcServer:
    server = DpcServer((host, port), ui_dir=ui_dir, verbose=verbose)
    if stack_path:
        server.load(stack_path, ref_path)
    return server


def run_server(stack_path: Optional[str], ref_path: Optional[str],
               host: str, port: int, ui_dir: Optional[str]) -> None:
    server = make_server(host, port, stack_path, ref_path, ui_dir, verbose=True)
    print(f"serving on http://{host}:{server.server_address[1]}"
          f"{' (no stack loaded)' if server.session.stack is None else ''}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
