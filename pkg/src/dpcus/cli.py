"""Command-line interface: every pipeline stage plus end-to-end recipes.

Artifacts flow through the raw-f32 + JSON-sidecar formats of :mod:`dpcus.io`.
Exit codes: 0 success, 2 parameter/validation error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import io as dio
from .beamform import BeamformedStack, BeamformError, compound_bmode, das_beamform
from .domain import MediumConfig, Scene, SceneError
from .dpc import (compound_dpc, cmode_assemble, enhance_integrate, focus_map,
                  gaussian_filter, subtract_reference)
from .forward import QuadratureError, compare_images, eval_forward_dpc, params_from_scene
from .presets import scatter_region
from .synth import (SynthesisError, gauss_delay_profile, gen_scatterers,
                    inclusion_delay_from_sos, sphere_delay_profile,
                    synthesize_rf)

WORKERS_ENV = "DPCUS_WORKERS"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def dpc_stage(stack: BeamformedStack, z_s: float, m: int, sigma: float,
              ref_stack: Optional[BeamformedStack] = None,
              enhance_p: int = 0):
    """The `dpc` subcommand pipeline, shared verbatim by the HTTP service so
    both produce identical bytes: compound, optional reference subtraction
    (reference recomputed at the same z_s and m), Gaussian filter, optional
    odd-power transverse integration."""
    img = compound_dpc(stack, m, z_s)
    if ref_stack is not None:
        img = subtract_reference(img, compound_dpc(ref_stack, m, z_s))
    if sigma > 0.0:
        img = gaussian_filter(img, sigma)
    if enhance_p:
        return enhance_integrate(img, enhance_p)
    return img


def _load_scene_config(path: str) -> tuple:
    """Scene config JSON -> (Scene, scatterer section dict)."""
    with open(path, "rb") as f:
        doc = json.loads(f.read())
    ab_doc = doc.get("aberrator")
    if ab_doc and "kind" in ab_doc:
        medium = MediumConfig(**doc["medium"])
        doc = dict(doc)
        doc["aberrator"] = dio.profile_to_dict(_build_profile(ab_doc, medium))
    scene = dio.scene_from_dict(doc)
    return scene, doc.get("scatterers", {})


def _build_profile(doc: dict, medium: MediumConfig):
    kind = doc["kind"]
    if kind == "none":
        return None
    if kind == "sphere":
        return sphere_delay_profile(doc["center_x"], doc["radius"],
                                    doc["max_delay"], doc["depth"])
    if kind == "gauss":
        return gauss_delay_profile(doc["center_x"], doc["waist"],
                                   doc["max_delay"], doc["depth"])
    if kind == "sos_inclusion":
        return inclusion_delay_from_sos((doc["center_x"], doc["center_z"]),
                                        doc["radius"], doc["dc_over_c"], medium)
    if kind == "samples":
        return dio.profile_from_dict(doc)
    raise SceneError(f"unknown aberrator kind: {kind!r}")


def _parse_roi(text: str) -> tuple:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise SceneError("ROI must be x_lo,x_hi,z_lo,z_hi")
    return tuple(parts)


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------

def cmd_simulate(args, prov: str) -> int:
    scene, scat = _load_scene_config(args.scene)
    seed = args.seed if args.seed is not None else int(scat.get("seed", 0))
    density = float(scat.get("density", 0.0))
    region = tuple(scat["region"]) if "region" in scat else scatter_region(scene)
    field = gen_scatterers(region, density, seed)
    rf = synthesize_rf(field, scene.aberrator, scene,
                       noise_std=args.noise_std, workers=_workers())
    dio.save_rf(args.out, rf, provenance=prov)
    print(f"wrote {args.out}: {field.count} scatterers, "
          f"{rf.samples.shape} samples")
    return 0


def cmd_beamform(args, prov: str) -> int:
    rf = dio.load_rf(args.rf)
    stack = das_beamform(rf, rf.scene.grid, f_number=args.fnum,
                         window=args.window, workers=_workers())
    dio.save_stack(args.out, stack, provenance=prov)
    print(f"wrote {args.out}: stack {stack.images.shape}")
    return 0


def cmd_bmode(args, prov: str) -> int:
    stack = dio.load_stack(args.stack)
    img = compound_bmode(stack)
    dio.save_image(args.out, img, provenance=prov)
    print(f"wrote {args.out}")
    return 0


def cmd_dpc(args, prov: str) -> int:
    stack = dio.load_stack(args.stack)
    ref = dio.load_stack(args.ref) if args.ref else None
    img = dpc_stage(stack, args.zs, args.m, args.sigma, ref_stack=ref,
                    enhance_p=args.enhance)
    dio.save_image(args.out, img, provenance=prov)
    print(f"wrote {args.out}")
    return 0


def cmd_focusmap(args, prov: str) -> int:
    stack = dio.load_stack(args.stack)
    g = stack.grid
    zs_lo = args.zs_min if args.zs_min is not None else g.z0
    zs_hi = args.zs_max if args.zs_max is not None else g.z_max
    zs = np.linspace(zs_lo, zs_hi, args.count)
    fmap = focus_map(stack, args.m, zs, signed=not args.absolute)
    dio.save_focusmap(args.out, fmap, provenance=prov)
    print(f"wrote {args.out}: {len(zs)} shear depths")
    return 0


def cmd_forward(args, prov: str) -> int:
    scene, _ = _load_scene_config(args.scene)
    if args.profile:
        with open(args.profile, "rb") as f:
            profile = dio.profile_from_dict(json.loads(f.read()))
    else:
        profile = scene.aberrator
    if profile is None:
        raise SceneError("no aberrator profile given (use --profile or scene)")
    params = params_from_scene(scene, m=args.m, phi_kappa=args.phi_kappa)
    img = eval_forward_dpc(profile, params, scene.grid,
                           check_convergence=not args.skip_convergence_check)
    dio.save_image(args.out, img, provenance=prov)
    print(f"wrote {args.out}")
    return 0


def cmd_compare(args, prov: str) -> int:
    a = dio.load_image(args.a)
    b = dio.load_image(args.b)
    rep = compare_images(a, b, _parse_roi(args.roi))
    print(json.dumps({"pearson_r": rep.pearson_r,
                      "sign_agreement": rep.sign_agreement,
                      "roi": list(rep.roi)}))
    return 0


def cmd_cmode(args, prov: str) -> int:
    rows = []
    grid = None
    for spec_text in args.slice:
        y_text, path = spec_text.split(":", 1)
        img = dio.load_image(path)
        grid = img.grid
        row = (img.values * img.valid).sum(axis=1) * img.grid.dz
        rows.append((float(y_text), row))
    rows.sort(key=lambda t: t[0])
    cm = cmode_assemble(rows, args.zs)
    dio.save_cmode(args.out, cm, grid, provenance=prov)
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def cmd_serve(args, prov: str) -> int:
    from .serve import run_server
    run_server(stack_path=args.stack, ref_path=args.ref, host=args.host,
               port=args.port, ui_dir=args.ui)
    return 0


def cmd_export_pgm(args, prov: str) -> int:
    arr, _ = dio.read_dataset(getattr(args, "in"))
    dio.export_pgm(args.out, arr.astype(float), clip_pct=args.clip_pct)
    print(f"wrote {args.out}")
    return 0


def cmd_export_csv(args, prov: str) -> int:
    arr, _ = dio.read_dataset(getattr(args, "in"))
    dio.export_csv(args.out, arr.astype(float))
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dpcus",
        description="differential phase contrast ultrasound workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="scene config -> RF dataset")
    p.add_argument("--scene", required=True, help="scene config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's scatterer seed")
    p.add_argument("--noise-std", type=float, default=0.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("beamform", help="RF dataset -> complex image stack")
    p.add_argument("--rf", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fnum", type=float, default=1.5)
    p.add_argument("--window", choices=("hann", "rect"), default="hann")
    p.set_defaults(func=cmd_beamform)

    p = sub.add_parser("bmode", help="stack -> log-envelope dB image")
    p.add_argument("--stack", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bmode)

    p = sub.add_parser("dpc", help="stack -> compounded phase image")
    p.add_argument("--stack", required=True)
    p.add_argument("--zs", type=float, required=True, help="shear depth (m)")
    p.add_argument("--m", type=int, default=1, help="tilt-pair separation")
    p.add_argument("--sigma", type=float, default=0.0,
                   help="Gaussian filter sigma (m), 0 = off")
    p.add_argument("--ref", default=None,
                   help="reference stack for edge-artifact subtraction")
    p.add_argument("--enhance", type=int, default=0,
                   help="odd power for enhanced transverse integration")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dpc)

    p = sub.add_parser("focusmap", help="stack -> shear-depth scan projections")
    p.add_argument("--stack", required=True)
    p.add_argument("--zs-min", type=float, default=None)
    p.add_argument("--zs-max", type=float, default=None)
    p.add_argument("--count", type=int, default=32)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--absolute", action="store_true",
                   help="integrate |values| instead of signed values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_focusmap)

    p = sub.add_parser("forward", help="screen profile -> model phase image")
    p.add_argument("--scene", required=True, help="scene config JSON")
    p.add_argument("--profile", default=None,
                   help="profile JSON (default: the scene's aberrator)")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--phi-kappa", type=float, default=0.05)
    p.add_argument("--skip-convergence-check", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("compare", help="two images -> correlation report")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--roi", required=True, help="x_lo,x_hi,z_lo,z_hi (m)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cmode", help="projected slices -> x-y image")
    p.add_argument("--slice", action="append", required=True,
                   metavar="Y:IMG", help="y position (m) and DPC image file")
    p.add_argument("--zs", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cmode)

    p = sub.add_parser("serve", help="HTTP service around a beamformed stack")
    p.add_argument("--stack", default=None)
    p.add_argument("--ref", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui", default=None, help="directory of static UI assets")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export-pgm", help="image/focusmap payload -> PGM")
    p.add_argument("in")
    p.add_argument("--out", required=True)
    p.add_argument("--clip-pct", type=float, default=99.0)
    p.set_defaults(func=cmd_export_pgm)

    p = sub.add_parser("export-csv", help="image/focusmap payload -> CSV")
    p.add_argument("in")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_csv)

    return ap


def cli_dispatch(argv) -> int:
    prov = "dpcus " + " ".join(str(a) for a in argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, prov)
    except (SceneError, dio.FileFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SynthesisError, BeamformError, QuadratureError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
