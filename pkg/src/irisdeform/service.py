"""HTTP service for deformation, matching and target-mask estimation.

Stateless JSON/PNG endpoints over the library, plus static hosting of the
examiner UI:

* ``GET  /health``       -> ``{"status": "ok"}``
* ``POST /deform``       -> PNG; multipart ``image`` + ``mask`` plus either a
  ``target_mask`` file or an ``alpha`` form field (circular target at that
  pupil-to-iris ratio, optionally intersected with an ``eyelid`` file);
  ``model`` selects linear / biomech / external.
* ``POST /match``        -> JSON ``{hamming, filter_distance, shift}`` for
  multipart ``image_a``/``mask_a``/``image_b``/``mask_b``.
* ``POST /mask/target``  -> PNG; multipart ``mask`` with form ``operation``
  (dilate / constrict / circular) and ``radius`` or ``alpha``.
* ``GET  /ui/...``       -> built examiner assets, when configured.

Malformed input is 400, geometric failures are 422 carrying the library
error name, and an unreachable or unconfigured external deformer is 503.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import fileio
from .deformation import Biomechanical, External, Linear, deform, rubber_sheet_normalize
from .errors import ExternalUnavailable, IrisToolkitError
from .geometry import (
    circular_target_mask,
    fit_circles,
    full_frame,
    target_mask_constrict,
    target_mask_dilate,
)
from .recognition import default_gabor_bank, encode, filter_response_distance, match_codes


class _BadInput(Exception):
    pass


def _read_image(upload: bytes, name: str):
    try:
        return fileio.decode_gray_png(upload)
    except Exception as exc:
        raise _BadInput(f"{name} is not a decodable grayscale PNG: {exc}") from exc


def _read_mask(upload: bytes, name: str):
    try:
        return fileio.decode_mask_png(upload)
    except Exception as exc:
        raise _BadInput(f"{name} is not a decodable mask PNG: {exc}") from exc


def _resolve_model(name: str, external_endpoint: str | None):
    name = (name or "linear").strip().lower()
    if name == "linear":
        return Linear()
    if name in ("biomech", "biomechanical"):
        return Biomechanical()
    if name == "external":
        if not external_endpoint:
            raise ExternalUnavailable("no external deformer endpoint configured")
        return External(endpoint=external_endpoint)
    raise _BadInput(f"unknown model {name!r}; expected linear, biomech or external")


def create_app(
    external_endpoint: str | None = None,
    ui_dir: str | None = None,
    max_shift: int = 16,
) -> FastAPI:
    app = FastAPI(title="irisdeform service")
    bank = default_gabor_bank()

    @app.exception_handler(_BadInput)
    async def _bad_input(_, exc):
        return JSONResponse(status_code=400, content={"error": "BadInput", "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _validation(_, exc):
        return JSONResponse(
            status_code=400, content={"error": "BadInput", "detail": str(exc.errors())}
        )

    @app.exception_handler(ExternalUnavailable)
    async def _external_down(_, exc):
        return JSONResponse(
            status_code=503, content={"error": "ExternalUnavailable", "detail": str(exc)}
        )

    @app.exception_handler(IrisToolkitError)
    async def _toolkit_error(_, exc):
        return JSONResponse(
            status_code=422, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/deform")
    async def deform_endpoint(
        image: UploadFile = File(...),
        mask: UploadFile = File(...),
        target_mask: UploadFile | None = File(None),
        eyelid: UploadFile | None = File(None),
        alpha: float | None = Form(None),
        model: str = Form("linear"),
    ):
        img = _read_image(await image.read(), "image")
        src_mask = _read_mask(await mask.read(), "mask")
        if target_mask is not None:
            tgt = _read_mask(await target_mask.read(), "target_mask")
        elif alpha is not None:
            lids = (
                _read_mask(await eyelid.read(), "eyelid")
                if eyelid is not None
                else full_frame(src_mask.shape)
            )
            tgt = circular_target_mask(fit_circles(src_mask), alpha, lids)
        else:
            raise _BadInput("either a target_mask file or an alpha form field is required")
        out, _ = deform(img, src_mask, tgt, _resolve_model(model, external_endpoint))
        return Response(content=fileio.encode_gray_png(out), media_type="image/png")

    @app.post("/match")
    async def match_endpoint(
        image_a: UploadFile = File(...),
        mask_a: UploadFile = File(...),
        image_b: UploadFile = File(...),
        mask_b: UploadFile = File(...),
    ):
        img_a = _read_image(await image_a.read(), "image_a")
        m_a = _read_mask(await mask_a.read(), "mask_a")
        img_b = _read_image(await image_b.read(), "image_b")
        m_b = _read_mask(await mask_b.read(), "mask_b")
        c_a, c_b = fit_circles(m_a), fit_circles(m_b)
        code_a = encode(rubber_sheet_normalize(img_a, m_a, c_a), bank)
        code_b = encode(rubber_sheet_normalize(img_b, m_b, c_b), bank)
        hamming, shift = match_codes(code_a, code_b, max_shift)
        fd = filter_response_distance(img_a, m_a, c_a, img_b, m_b, c_b, bank)
        return {"hamming": hamming, "filter_distance": fd, "shift": shift}

    @app.post("/mask/target")
    async def mask_target_endpoint(
        mask: UploadFile = File(...),
        operation: str = Form(...),
        radius: float | None = Form(None),
        alpha: float | None = Form(None),
        eyelid: UploadFile | None = File(None),
    ):
        src_mask = _read_mask(await mask.read(), "mask")
        lids = (
            _read_mask(await eyelid.read(), "eyelid")
            if eyelid is not None
            else full_frame(src_mask.shape)
        )
        circles = fit_circles(src_mask)
        op = operation.strip().lower()
        if op == "dilate":
            if radius is None:
                raise _BadInput("dilate requires a radius form field")
            out = target_mask_dilate(src_mask, circles, radius)
        elif op == "constrict":
            if radius is None:
                raise _BadInput("constrict requires a radius form field")
            out = target_mask_constrict(src_mask, circles, radius, lids)
        elif op == "circular":
            if alpha is None:
                raise _BadInput("circular requires an alpha form field")
            out = circular_target_mask(circles, alpha, lids)
        else:
            raise _BadInput(f"unknown operation {operation!r}")
        return Response(content=fileio.encode_mask_png(out), media_type="image/png")

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(host: str = "127.0.0.1", port: int = 8000, **kwargs) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(**kwargs), host=host, port=port)
