"""Command-line interface.

Subcommands: curate, deform, mask-target, rectify, encode, match, evaluate,
serve. Exit codes: 0 success, 1 usage error, 2 data error. A ``--config``
file of ``key = value`` lines supplies defaults for any flag (flags win on
conflict); keys use the flag name with dashes or underscores.

All outputs are reproducible: identical inputs, flags and seed give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import IrisToolkitError


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _convert(value: str):
    low = value.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    for cast in (int, float):
        try:
            return cast(low)
        except ValueError:
            continue
    return low


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, raw = line.split("=", 1)
            values[key.strip().replace("-", "_")] = _convert(raw)
    return values


def _parse_binning(spec: str):
    from .geometry import Binning

    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"--bins expects LO:HI:WIDTH, got {spec!r}")
    return Binning(lo=float(parts[0]), hi=float(parts[1]), width=float(parts[2]))


def _resolve_model(args):
    from .deformation import Biomechanical, External, Linear
    from .errors import ExternalUnavailable

    name = args.model
    if name == "linear":
        return Linear()
    if name in ("biomech", "biomechanical"):
        return Biomechanical()
    if name == "external":
        if not getattr(args, "endpoint", None):
            raise ExternalUnavailable("--model external requires --endpoint")
        return External(endpoint=args.endpoint, timeout=args.timeout)
    raise ValueError(f"unknown model {name!r}")


def _mask_out_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + "_mask" + (p.suffix or ".png")))


def _load_bank(path):
    from .recognition import FilterBank, default_gabor_bank

    return FilterBank.load(path) if path else default_gabor_bank()


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def _cmd_curate(args) -> int:
    from .pipeline import DatasetConfig, run_curation

    cfg = DatasetConfig(
        manifest_path=args.manifest,
        output_dir=args.out,
        binning=_parse_binning(args.bins),
        crop_size=args.crop_size,
        crop_padding=args.crop_padding,
        jobs=args.jobs,
    )
    curated, pairs, result = run_curation(cfg)
    failed = {k: v for k, v in result.statuses.items() if v.startswith("failed")}
    print(
        f"curated {len(curated)}/{len(result.statuses)} images, "
        f"{len(pairs)} cross-bin pairs, {result.timing_ms:.0f} ms"
    )
    for item, status in failed.items():
        print(f"  {item}: {status}", file=sys.stderr)
    return 0


def _cmd_deform(args) -> int:
    from . import fileio
    from .deformation import deform

    img = fileio.load_gray_png(args.input)
    mask = fileio.load_mask_png(args.mask)
    target = fileio.load_mask_png(args.target)
    out, out_mask = deform(img, mask, target, _resolve_model(args))
    fileio.save_gray_png(args.out, out)
    fileio.save_mask_png(_mask_out_path(args.out), out_mask)
    return 0


def _cmd_mask_target(args) -> int:
    from . import fileio
    from .geometry import (
        circular_target_mask,
        fit_circles,
        full_frame,
        target_mask_constrict,
        target_mask_dilate,
    )

    mask = fileio.load_mask_png(args.mask)
    eyelid = fileio.load_mask_png(args.eyelid) if args.eyelid else full_frame(mask.shape)
    circles = fit_circles(mask)
    if args.op == "dilate":
        if args.radius is None:
            raise ValueError("--op dilate requires --radius")
        out = target_mask_dilate(mask, circles, args.radius)
    elif args.op == "constrict":
        if args.radius is None:
            raise ValueError("--op constrict requires --radius")
        out = target_mask_constrict(mask, circles, args.radius, eyelid)
    else:
        if args.alpha is None:
            raise ValueError("--op circular requires --alpha")
        out = circular_target_mask(circles, args.alpha, eyelid)
    fileio.save_mask_png(args.out, out)
    return 0


def _cmd_rectify(args) -> int:
    from . import fileio
    from .deformation import deform
    from .geometry import circular_target_mask, fit_circles, full_frame

    img = fileio.load_gray_png(args.input)
    mask = fileio.load_mask_png(args.mask)
    eyelid = fileio.load_mask_png(args.eyelid) if args.eyelid else full_frame(mask.shape)
    circles = fit_circles(mask)
    target = circular_target_mask(circles, args.alpha, eyelid)
    out, out_mask = deform(img, mask, target, _resolve_model(args))
    fileio.save_gray_png(args.out, out)
    fileio.save_mask_png(_mask_out_path(args.out), out_mask)
    return 0


def _cmd_encode(args) -> int:
    from . import fileio
    from .deformation import rubber_sheet_normalize
    from .geometry import fit_circles
    from .recognition import encode, save_code

    img = fileio.load_gray_png(args.input)
    mask = fileio.load_mask_png(args.mask)
    block = rubber_sheet_normalize(img, mask, fit_circles(mask), args.rows, args.cols)
    save_code(args.out, encode(block, _load_bank(args.bank)))
    return 0


def _cmd_match(args) -> int:
    from . import fileio
    from .deformation import rubber_sheet_normalize
    from .geometry import fit_circles
    from .recognition import encode, filter_response_distance, match_codes

    bank = _load_bank(args.bank)
    img_a = fileio.load_gray_png(args.probe)
    m_a = fileio.load_mask_png(args.probe_mask)
    img_b = fileio.load_gray_png(args.gallery)
    m_b = fileio.load_mask_png(args.gallery_mask)
    c_a, c_b = fit_circles(m_a), fit_circles(m_b)
    code_a = encode(rubber_sheet_normalize(img_a, m_a, c_a), bank)
    code_b = encode(rubber_sheet_normalize(img_b, m_b, c_b), bank)
    hamming, shift = match_codes(code_a, code_b, args.max_shift)
    fd = filter_response_distance(img_a, m_a, c_a, img_b, m_b, c_b, bank)
    print(json.dumps(
        {"hamming": hamming, "filter_distance": fd, "shift": shift}, sort_keys=True
    ))
    return 0


def _cmd_evaluate(args) -> int:
    from .evaluation import (
        BootstrapConfig,
        decidability,
        delta_binned_report,
        format_report_table,
        read_scores_csv,
        report_to_csv,
    )

    cfg = BootstrapConfig(fraction=args.fraction, iterations=args.iterations, seed=args.seed)
    edges = [float(e) for e in args.bins.split(",")]
    reports = {}
    for spec in args.scores:
        label, _, path = spec.rpartition("=")
        label = label or Path(path).stem
        scores = read_scores_csv(path, distances=args.distances)
        reports[label] = delta_binned_report(scores, edges, cfg)
        try:
            dprime = decidability(scores)
            print(f"{label}: d'={dprime:.4f}")
        except IrisToolkitError:
            pass
    print(format_report_table(reports))
    if args.out_csv:
        report_to_csv(args.out_csv, reports)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(
        host=args.host,
        port=args.port,
        external_endpoint=args.external_endpoint,
        ui_dir=args.ui_dir,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="irisdeform", description=__doc__)
    parser.add_argument("--config", help="key = value defaults file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="crop, bin and pair a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bins", default="0.2:0.7:0.1", help="ratio binning LO:HI:WIDTH")
    p.add_argument("--crop-size", type=int, default=256)
    p.add_argument("--crop-padding", type=int, default=16)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_curate)

    p = sub.add_parser("deform", help="deform an iris to a target mask")
    p.add_argument("--model", default="linear", choices=["linear", "biomech", "external"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--endpoint", help="external deformer URL")
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=_cmd_deform)

    p = sub.add_parser("mask-target", help="estimate a dilate/constrict/circular target mask")
    p.add_argument("--op", required=True, choices=["dilate", "constrict", "circular"])
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eyelid")
    p.set_defaults(func=_cmd_mask_target)

    p = sub.add_parser("rectify", help="deform to a circular pupil at ratio alpha")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--alpha", type=float, default=0.35)
    p.add_argument("--out", required=True)
    p.add_argument("--eyelid")
    p.add_argument("--model", default="linear", choices=["linear", "biomech", "external"])
    p.add_argument("--endpoint")
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=_cmd_rectify)

    p = sub.add_parser("encode", help="normalize and encode an iris image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bank", help="kernel container replacing the Gabor default")
    p.add_argument("--rows", type=int, default=64)
    p.add_argument("--cols", type=int, default=512)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("match", help="compare two iris images")
    p.add_argument("--probe", required=True)
    p.add_argument("--probe-mask", required=True)
    p.add_argument("--gallery", required=True)
    p.add_argument("--gallery-mask", required=True)
    p.add_argument("--bank")
    p.add_argument("--max-shift", type=int, default=16)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("evaluate", help="delta-binned bootstrap AUC report")
    p.add_argument("scores", nargs="+", metavar="LABEL=SCORES.csv",
                   help="score CSVs; bare paths use the file stem as label")
    p.add_argument("--bins", default="0,0.1,0.2,0.3,0.4", help="delta bin edges")
    p.add_argument("--fraction", type=float, default=0.10)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distances", action="store_true",
                   help="scores are distances (lower = more similar)")
    p.add_argument("--out-csv")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--external-endpoint")
    p.add_argument("--ui-dir")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    namespace = argparse.Namespace()
    if "--config" in argv:
        try:
            config_path = argv[argv.index("--config") + 1]
        except IndexError:
            parser.print_usage(sys.stderr)
            print("irisdeform: error: --config needs a path", file=sys.stderr)
            return 1
        try:
            for key, value in _load_config(config_path).items():
                setattr(namespace, key, value)
        except (OSError, ValueError) as exc:
            print(f"irisdeform: config error: {exc}", file=sys.stderr)
            return 2
    try:
        args = parser.parse_args(argv, namespace=namespace)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (IrisToolkitError, OSError, ValueError) as exc:
        print(f"irisdeform: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
