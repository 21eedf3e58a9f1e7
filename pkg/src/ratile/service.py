"""HTTP service exposing the analysis pipeline.

All numeric payloads use exact rational strings ("p/q"); floats appear only
in display-oriented fields (embed values, Hausdorff bounds).  Errors carry
the process exit-code contract: 2 config, 3 math precondition, 4 internal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import badic, chars, tile
from .errors import ConfigError, PreconditionError, RatileError
from .exact import QMatrix
from .frobenius import invariant_factors
from .zmodule import Base, DigitSystem, ModuleElement, expand

app = FastAPI(title="ratile", description="rational matrix digit systems "
              "and self-affine tiles")


class Options(BaseModel):
    k: Optional[int] = None
    depth: Optional[int] = None
    cap: Optional[int] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    window: Optional[str] = None


class SystemConfig(BaseModel):
    matrix: list[list[str]]
    digits: Optional[list] = None
    options: Options = Field(default_factory=Options)


class ExpandRequest(BaseModel):
    config: SystemConfig
    vector: list[str]
    max_steps: int = 64
    policy: str = "first"


class TileRequest(BaseModel):
    config: SystemConfig
    k: int
    depth: Optional[int] = None
    cap: int = 10 ** 6


class TilingRequest(BaseModel):
    config: SystemConfig
    k: int
    depth: Optional[int] = None
    samples: int = 50
    window: Optional[str] = None
    seed: int = 0


class CharsRequest(BaseModel):
    config: SystemConfig
    s: str                       # digit-string format, transpose side
    y: str                       # digit-string format or a plain vector
    r: Optional[list[str]] = None
    x: Optional[list[str]] = None


def _fraction(text, where):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"bad rational {text!r} at {where}: {err}") from err


def _build_base(config: SystemConfig) -> Base:
    rows = config.matrix
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ConfigError("matrix must be square and nonempty")
    entries = [[_fraction(x, f"matrix[{i}][{j}]")
                for j, x in enumerate(row)] for i, row in enumerate(rows)]
    return Base(QMatrix(entries))


def _parse_digit(base: Base, entry, where):
    """A digit literal: flat integer vector, or {exponent: vector} support."""
    if isinstance(entry, dict):
        support = {}
        for key, vec in entry.items():
            try:
                exp = int(key)
            except ValueError as err:
                raise ConfigError(f"bad exponent {key!r} at {where}") from err
            if exp < 0:
                raise ConfigError(f"digit exponents must be >= 0 at {where}")
            support[exp] = tuple(int(_fraction(x, where)) for x in vec)
        return ModuleElement(base, support)
    vec = []
    for x in entry:
        q = _fraction(x, where)
        if q.denominator != 1:
            raise ConfigError(
                f"flat digit vectors must be integral at {where}; "
                "use the exponent form for proper module elements")
        vec.append(int(q))
    if len(vec) != base.n:
        raise ConfigError(f"digit dimension mismatch at {where}")
    return base.from_vector(vec)


def _build_system(config: SystemConfig, base=None) -> DigitSystem:
    if base is None:
        base = _build_base(config)
    if config.digits is None:
        return DigitSystem.standard_from_residues(base)
    digits = [_parse_digit(base, d, f"digits[{i}]")
              for i, d in enumerate(config.digits)]
    return DigitSystem(base, digits)


@app.exception_handler(RatileError)
async def _ratile_error(request: Request, exc: RatileError):
    return JSONResponse(status_code=400,
                        content={"error": str(exc), "code": exc.exit_code})


def _poly_strings(p):
    return [str(c) for c in p.coeffs]


@app.post("/analyze")
def analyze(config: SystemConfig):
    base = _build_base(config)
    counts = base.counts
    fact = invariant_factors(base.A)
    out = {
        "n": base.n,
        "a": counts.a,
        "b": counts.b,
        "det": str(abs(base.A.det())),
        "m": base.m,
        "invariant_factors": [_poly_strings(f) for f in fact.factors],
        "primitive_factors": [[str(c) for c in f]
                              for f in fact.primitive_factors],
        "reciprocal_factors": [[str(c) for c in f]
                               for f in fact.reciprocals],
    }
    if counts.b == 1:
        out["warning"] = ("b = 1: solenoid trivial, tile operations "
                          "disabled")
        out["stabilization"] = {"A": base.kernel_lattice("A")
                                .stabilization_depth}
    else:
        out["stabilization"] = {
            side: base.kernel_lattice(side).stabilization_depth
            for side in ("A", "B")}
        out["residues"] = {
            side: [list(v) for v in base.residues(side).representatives]
            for side in ("A", "B")}
    if config.digits is not None:
        system = _build_system(config, base)
        out["standard"] = system.standard
    return out


@app.post("/residues")
def residues(config: SystemConfig, side: str = "B"):
    if side not in ("A", "B"):
        raise ConfigError("side must be 'A' or 'B'")
    base = _build_base(config)
    if side == "B" and base.counts.b == 1:
        raise PreconditionError("b = 1: the B-side quotient is trivial")
    res = base.residues(side)
    return {
        "side": side,
        "count": len(res.representatives),
        "representatives": [list(v) for v in res.representatives],
    }


@app.post("/expand")
def expand_endpoint(req: ExpandRequest):
    base = _build_base(req.config)
    system = _build_system(req.config, base)
    vec = [_fraction(x, "vector") for x in req.vector]
    if len(vec) != base.n:
        raise ConfigError("vector dimension mismatch")
    if any(q.denominator != 1 for q in vec):
        raise ConfigError("expansion input must be an integer vector")
    x = base.from_vector([int(q) for q in vec])
    result = expand(x, system, max_steps=req.max_steps, policy=req.policy)
    return {
        "status": result.status,
        "digits": [d.serialize() for d in result.digits],
        "preperiod": result.preperiod,
        "period": result.period,
    }


def _cloud_csv(system: DigitSystem, k, depth, cap):
    import csv
    import io

    cloud = tile.point_cloud(system, k, depth, cap=cap)
    n = system.base.n
    rows = []
    for p in cloud.points:
        rows.append((p.badic_part.to_string(),
                     [str(x) for x in p.real_part],
                     repr(badic.embed_real(p.badic_part))))
    rows.sort(key=lambda r: r[0])
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"re_{i + 1}" for i in range(n)] + ["badic", "embed"])
    for bstr, reals, embed in rows:
        writer.writerow(reals + [bstr, embed])
    return out.getvalue(), cloud


@app.post("/tile")
def tile_endpoint(req: TileRequest):
    base = _build_base(req.config)
    if base.counts.b == 1:
        raise PreconditionError(
            "b = 1: solenoid trivial, tile operations disabled")
    system = _build_system(req.config, base)
    depth = req.depth if req.depth is not None else req.k + 4
    csv_text, cloud = _cloud_csv(system, req.k, depth, req.cap)
    return {
        "k": req.k,
        "depth": depth,
        "rows": len(cloud.points),
        "hausdorff_bound": cloud.hausdorff_bound,
        "csv": csv_text,
    }


@app.post("/tiling")
def tiling(req: TilingRequest):
    base = _build_base(req.config)
    if base.counts.b == 1:
        raise PreconditionError(
            "b = 1: solenoid trivial, tile operations disabled")
    system = _build_system(req.config, base)
    window = None if req.window is None else _fraction(req.window, "window")
    report = tile.multiplicity_estimate(
        system, req.k, depth=req.depth, samples=req.samples,
        window=window, seed=req.seed)
    return {
        "k": report.k,
        "samples": report.samples,
        "histogram": {str(c): v for c, v in sorted(report.histogram.items())},
        "modal_multiplicity": report.modal_multiplicity,
        "fraction_at_mode": report.fraction_at_mode,
        "ambiguous": report.ambiguous,
        "window_adequate": report.window_adequate,
        "seed": report.seed,
        "notes": list(report.notes),
    }


@app.post("/chars")
def chars_endpoint(req: CharsRequest):
    base = _build_base(req.config)
    ctx = chars.DualContext(base)
    s = _parse_star(req.s, ctx)
    y = _parse_y(req.y, base)
    value = chars.S(s, y, ctx)
    out = {"S": str(value), "turn": str(chars.mod1(value))}
    if req.r is not None:
        x = [_fraction(v, "x") for v in (req.x or ["0"] * base.n)]
        r = [_fraction(v, "r") for v in req.r]
        if len(x) != base.n or len(r) != base.n:
            raise ConfigError("r and x must have the matrix dimension")
        out["combined_turn"] = str(chars.character_angle(r, x, s, y, ctx))
    return out


def _parse_star(text, ctx: chars.DualContext):
    """s in the digit-string format with digits given as estar vectors."""
    from .badic import TruncatedBAdic
    try:
        nu_part, d_part = text.split(";d=", 1)
        nu_text = nu_part.split("=", 1)[1]
        if nu_text == "inf":
            return TruncatedBAdic.zero(ctx.star_ctx, 0)
        nu = int(nu_text)
        vectors = []
        if d_part:
            for chunk in d_part.split("|"):
                vectors.append(tuple(int(x) for x in chunk.split(",")))
    except (ValueError, IndexError) as err:
        raise ConfigError(f"bad character index {text!r}: {err}") from err
    return ctx.character_index(nu, vectors)


def _parse_y(text, base: Base):
    """y in the digit-string format, or a plain vector of Z^n."""
    ctx = badic._context_for(base)
    if ";d=" in text:
        return badic.TruncatedBAdic.from_string(ctx, text, exact=True)
    try:
        vec = [int(x) for x in text.split(",")]
    except ValueError as err:
        raise ConfigError(f"bad point {text!r}: {err}") from err
    if len(vec) != base.n:
        raise ConfigError("point dimension mismatch")
    elem = base.from_vector(vec)
    return badic.normalize(elem, 64)
