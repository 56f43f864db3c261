"""Reading and writing signals, components and spiral exports.

Formats
-------
csv1d
    One real number per line; lines starting with ``#`` and blank lines are
    skipped.  Written with 17 significant digits, which round-trips float64.
csv2d
    One image row per line, comma separated.
pgm
    Netpbm greymap, ASCII ``P2`` or binary ``P5``, maxval up to 65535
    (16-bit samples big-endian).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .signal import as_signal

__all__ = [
    "FORMATS",
    "SignalFormatError",
    "display_mapping",
    "format_float",
    "read_pgm",
    "read_signal",
    "write_pgm",
    "write_signal",
    "write_spiral_csv",
    "write_spiral_svg",
]

FORMATS = ("csv1d", "csv2d", "pgm")


class SignalFormatError(ValueError):
    """Malformed or unsupported signal file."""


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def _read_lines(path) -> list[tuple[int, str]]:
    text = Path(path).read_text(encoding="utf-8")
    return [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)
            if ln.strip() and not ln.lstrip().startswith("#")]


def _parse_float(tok: str, where: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise SignalFormatError(f"{where}: not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise SignalFormatError(f"{where}: non-finite value {tok!r}")
    return v


def _read_csv1d(path) -> NDArray:
    rows = _read_lines(path)
    if not rows:
        raise SignalFormatError(f"{path}: no samples")
    vals = []
    for lineno, ln in rows:
        if "," in ln:
            raise SignalFormatError(f"{path}:{lineno}: expected one value per line")
        vals.append(_parse_float(ln, f"{path}:{lineno}"))
    return np.array(vals)


def _read_csv2d(path) -> NDArray:
    rows = _read_lines(path)
    if not rows:
        raise SignalFormatError(f"{path}: no samples")
    out = []
    for lineno, ln in rows:
        out.append([_parse_float(t.strip(), f"{path}:{lineno}") for t in ln.split(",")])
        if len(out[-1]) != len(out[0]):
            raise SignalFormatError(f"{path}:{lineno}: expected {len(out[0])} columns, got {len(out[-1])}")
    return np.array(out)


def read_pgm(path) -> tuple[NDArray, int]:
    """Return ``(pixels, maxval)``; pixels are float64, row-major (height, width)."""
    data = Path(path).read_bytes()
    pos = 0

    def token() -> str:
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise SignalFormatError(f"{path}: byte {start}: unexpected end of header")
        return data[start:pos].decode("ascii", errors="replace")

    def integer(what: str) -> int:
        at = pos
        tok = token()
        if not tok.isdigit():
            raise SignalFormatError(f"{path}: byte {at}: bad {what} {tok!r}")
        return int(tok)

    if not data:
        raise SignalFormatError(f"{path}: empty file")
    magic = token()
    if magic not in ("P2", "P5"):
        raise SignalFormatError(f"{path}: byte 0: unsupported magic {magic!r} (expected P2 or P5)")
    width, height = integer("width"), integer("height")
    maxval = integer("maxval")
    if width < 1 or height < 1:
        raise SignalFormatError(f"{path}: zero-sized image {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise SignalFormatError(f"{path}: unsupported maxval {maxval}")
    count = width * height

    if magic == "P5":
        pos += 1  # single whitespace byte after maxval
        nbytes = 1 if maxval < 256 else 2
        body = data[pos:pos + count * nbytes]
        if len(body) < count * nbytes:
            raise SignalFormatError(f"{path}: byte {pos + len(body)}: pixel data truncated "
                                    f"({len(body)} of {count * nbytes} bytes)")
        px = np.frombuffer(body, dtype=np.uint8 if nbytes == 1 else ">u2").astype(float)
    else:
        vals = []
        for _ in range(count):
            if pos >= len(data) or not data[pos:].strip():
                raise SignalFormatError(f"{path}: byte {pos}: expected {count} pixels, got {len(vals)}")
            vals.append(integer("pixel"))
        px = np.array(vals, dtype=float)
    if np.any(px > maxval):
        raise SignalFormatError(f"{path}: pixel value exceeds maxval {maxval}")
    return px.reshape(height, width), maxval


def read_signal(path, fmt: str) -> NDArray:
    """Load a real-valued signal from ``path`` in format ``fmt``."""
    if fmt == "csv1d":
        x = _read_csv1d(path)
    elif fmt == "csv2d":
        x = _read_csv2d(path)
    elif fmt == "pgm":
        x, _ = read_pgm(path)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return as_signal(x, str(path))


def display_mapping(x: NDArray, maxval: int = 255) -> tuple[float, float]:
    """Affine ``(offset, scale)`` with ``pixel = round((v - offset) * scale)``.

    Samples already inside ``[0, maxval]`` map with ``(0, 1)``; an all-zero
    signal gets ``(0, 0)``; anything else is stretched min -> 0, max -> maxval.
    """
    lo, hi = float(np.min(x)), float(np.max(x))
    if lo == 0 and hi == 0:
        return 0.0, 0.0
    if lo >= 0 and hi <= maxval:
        return 0.0, 1.0
    if hi == lo:
        return lo, 0.0
    return lo, maxval / (hi - lo)


def write_pgm(path, x: ArrayLike, maxval: int = 255, binary: bool = True) -> tuple[float, float]:
    """Write a display copy of a 2D signal; returns the ``(offset, scale)`` used."""
    x = np.real(as_signal(x))
    if x.ndim != 2:
        raise ValueError("PGM output needs a 2D signal")
    if not 1 <= maxval <= 65535:
        raise ValueError(f"unsupported maxval {maxval}")
    offset, scale = display_mapping(x, maxval)
    px = np.clip(np.rint((x - offset) * scale), 0, maxval).astype(np.int64)
    h, w = x.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
            fh.write(px.astype(np.uint8 if maxval < 256 else ">u2").tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n{maxval}\n".encode("ascii"))
            for row in px:
                fh.write((" ".join(str(v) for v in row) + "\n").encode("ascii"))
    return offset, scale


def write_signal(x: ArrayLike, path, fmt: str, maxval: int = 255) -> tuple[float, float] | None:
    """Write ``x`` to ``path``.

    CSV output is exact (17 significant digits).  PGM output is a display
    copy and returns its ``(offset, scale)`` mapping; keep an exact CSV
    alongside it whenever the values matter.
    """
    x = as_signal(x)
    if np.iscomplexobj(x):
        if np.any(x.imag != 0):
            raise ValueError("only real signals can be written")
        x = x.real
    try:
        if fmt == "csv1d":
            if x.ndim != 1:
                raise ValueError("csv1d output needs a 1D signal")
            Path(path).write_text("".join(format_float(v) + "\n" for v in x), encoding="utf-8", newline="\n")
        elif fmt == "csv2d":
            rows = x.reshape(1, -1) if x.ndim == 1 else x
            Path(path).write_text("".join(",".join(format_float(v) for v in r) + "\n" for r in rows),
                                  encoding="utf-8", newline="\n")
        elif fmt == "pgm":
            return write_pgm(path, x, maxval)
        else:
            raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return None


def write_spiral_csv(path, spiral) -> None:
    """Columns ``l, T_1..T_d, [phi,] norm`` for ``l = 0..L``."""
    d = spiral.dim
    head = ["l"] + [f"T_{k}" for k in range(1, d + 1)]
    if spiral.angles is not None:
        head.append("phi")
    head.append("norm")
    norms = spiral.norms()
    lines = [",".join(head)]
    for l, v in enumerate(spiral.vertices):
        row = [str(l)] + [format_float(c) for c in v]
        if spiral.angles is not None:
            row.append(format_float(spiral.angles[l - 1]) if l > 0 else "")
        row.append(format_float(norms[l]))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# orthographic view for 3D: looking down (1, 1, 1)
_ISO_U = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
_ISO_V = np.array([-1.0, -1.0, 2.0]) / math.sqrt(6.0)


def _projection(dim: int) -> tuple[NDArray, NDArray, str]:
    if dim == 2:
        return np.array([1.0, 0.0]), np.array([0.0, 1.0]), "identity (x, y)"
    if dim == 3:
        return _ISO_U, _ISO_V, "orthographic onto the plane with normal (1,1,1)/sqrt(3); u=(1,-1,0)/sqrt(2), v=(-1,-1,2)/sqrt(6)"
    u = np.zeros(dim)
    v = np.zeros(dim)
    u[0], v[1] = 1.0, 1.0
    return u, v, "orthographic onto coordinates (1, 2)"


def write_spiral_svg(path, spiral) -> str:
    """Write the vertices as an SVG 1.1 polyline in data units (y up).

    Coordinates are rounded to 6 decimals.  Returns the projection
    description, which is also stored in the file's ``<metadata>``.
    """
    u, v, desc = _projection(spiral.dim)
    pts = np.column_stack((spiral.vertices @ u, -(spiral.vertices @ v)))
    lo = pts.min(axis=0) - 0.5
    span = pts.max(axis=0) + 0.5 - lo
    stroke = max(float(span.max()) / 400.0, 0.005)
    coords = " ".join(f"{a:.6f},{b:.6f}" for a, b in pts)
    spokes = "".join(f'<line x1="0" y1="0" x2="{a:.6f}" y2="{b:.6f}"/>' for a, b in pts[1:])
    svg = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{lo[0]:.6f} {lo[1]:.6f} {span[0]:.6f} {span[1]:.6f}" width="600" height="600">\n'
        f"<title>Discrete spiral of Theodorus, {spiral.dim}D, {spiral.n_steps} steps</title>\n"
        f"<metadata>dim={spiral.dim}; steps={spiral.n_steps}; projection={desc}</metadata>\n"
        f'<g stroke="#9a9a9a" stroke-width="{stroke / 2:.6f}">{spokes}</g>\n'
        f'<polyline fill="none" stroke="#1f4e9a" stroke-width="{stroke:.6f}" '
        f'stroke-linejoin="round" points="{coords}"/>\n'
        "</svg>\n"
    )
    Path(path).write_text(svg, encoding="utf-8", newline="\n")
    return desc
