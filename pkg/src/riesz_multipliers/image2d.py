"""Planar application: steered frequency-domain filtering and corner detection.

For a planar monomial kernel cos^t1 * sin^t2 (t1 + t2 even) the Fourier
multiplier reduces to a trigonometric polynomial of the frequency angle nu,

    M(nu) = sum_{p,q} cos(nu - theta0)^(p+t2-q) sin(nu - theta0)^(q+t1-p)
            * C(t1,p) C(t2,q) B_{p,q},

with closed-form circle moments B_{p,q}.  theta0 steers the kernel: edges
whose normal is congruent to theta0 (mod pi/2) are suppressed while corners
respond at every orientation, which is what the corner-detection pipeline
exploits.  Filtering is cyclic (periodic boundaries): forward FFT, pointwise
multiply, inverse FFT, real part.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import KernelAdmissibilityError
from .special_functions import g_a_log, g_a_sgn


@dataclass(frozen=True)
class Kernel2dSpec:
    """Planar kernel: power t1 on the first coordinate, t2 on the second,
    steered by theta0 radians."""

    t1: int
    t2: int
    theta0: float = 0.0

    def __post_init__(self):
        if self.t1 < 0 or self.t2 < 0 or self.t < 1:
            raise ValueError(f"need nonnegative powers with t1+t2 >= 1, got ({self.t1}, {self.t2})")
        if self.t % 2 != 0:
            raise ValueError(f"planar filtering uses even total order, got t = {self.t}")
        if self.t1 % 2 == 0 and self.t2 % 2 == 0:
            raise KernelAdmissibilityError(
                f"kernel ({self.t1}, {self.t2}) has nonzero circle mean (both powers "
                "even); an admissible kernel needs an odd power")

    @property
    def t(self) -> int:
        return self.t1 + self.t2


def bpq(p: int, q: int, t1: int, t2: int, kernel: str = "neglog",
        method: str = "closed") -> float:
    """Circle moment B_{p,q} = (-1)^(t1-p) * integral over [0, 2pi] of
    cos^(p+q) sin^(t-p-q) g(cos).

    Closed form reduces to the half-range kernel moments; the quadrature
    method integrates directly and exists as a fallback/cross-check.
    """
    if not (0 <= p <= t1 and 0 <= q <= t2):
        raise IndexError(f"need 0 <= p <= t1 and 0 <= q <= t2, got p={p}, q={q}")
    m, k = p + q, t1 + t2 - p - q
    sign = -1.0 if (t1 - p) % 2 else 1.0
    if method == "quadrature":
        return sign * _circle_moment_quadrature(m, k, kernel)
    if method != "closed":
        raise ValueError(f"method must be 'closed' or 'quadrature', got {method!r}")
    if k % 2 == 1:
        return 0.0
    if kernel == "neglog":
        if m % 2 == 1:
            return 0.0
        return sign * 2.0 * g_a_log(m, m + k, 2)
    if kernel == "sgn":
        if m % 2 == 0:
            return 0.0
        return sign * 2.0 * g_a_sgn(m, m + k, 2)
    raise ValueError(f"unknown kernel {kernel!r}")


def _circle_moment_quadrature(m: int, k: int, kernel: str) -> float:
    from scipy.integrate import quad

    if kernel == "sgn":
        g = lambda x: math.copysign(1.0, x)
    elif kernel == "neglog":
        g = lambda x: -math.log(abs(x)) if x != 0.0 else 0.0
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    f = lambda a: math.cos(a) ** m * math.sin(a) ** k * g(math.cos(a))
    # split at the kernel's singular/discontinuous angles
    cuts = [0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi, 2.0 * math.pi]
    return sum(quad(f, lo, hi, limit=400)[0] for lo, hi in zip(cuts, cuts[1:]))


@lru_cache(maxsize=128)
def _bpq_table(t1: int, t2: int, kernel: str) -> tuple[tuple[int, int, float, float], ...]:
    rows = []
    for p in range(t1 + 1):
        for q in range(t2 + 1):
            b = bpq(p, q, t1, t2, kernel)
            if b != 0.0:
                rows.append((p + t2 - q, q + t1 - p, math.comb(t1, p) * math.comb(t2, q), b))
    return tuple(rows)


def multiplier_2d(spec: Kernel2dSpec, nu, kernel: str = "neglog"):
    """Multiplier value at frequency angle(s) nu (scalar or array)."""
    nu = np.asarray(nu, dtype=float)
    c, s = np.cos(nu - spec.theta0), np.sin(nu - spec.theta0)
    out = np.zeros_like(nu)
    for ce, se, comb, b in _bpq_table(spec.t1, spec.t2, kernel):
        out = out + (c ** ce) * (s ** se) * (comb * b)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MultiplierGrid:
    """Multiplier sampled on the discrete frequency lattice (zero bin is 0)."""

    width: int
    height: int
    values: np.ndarray  # complex, shape (height, width)


def _signed_frequencies(size: int) -> np.ndarray:
    # FFT bin order with the Nyquist bin assigned to the positive side
    j = np.arange(size)
    return np.where(j <= size // 2, j, j - size).astype(float)


def build_multiplier_grid(spec: Kernel2dSpec, width: int, height: int,
                          kernel: str = "neglog") -> MultiplierGrid:
    """Sample the multiplier at every nonzero frequency bin.

    Bin (k1, k2) uses signed centered coordinates (k1 along width, k2 along
    height) and the value multiplier_2d(atan2(k2, k1)); the multiplier is
    scale-free in |k|, and the zero bin is set to 0, which pins the filtered
    image mean to zero.
    """
    if width < 8 or height < 8:
        raise ValueError(f"need width, height >= 8, got {width}x{height}")
    k1, k2 = np.meshgrid(_signed_frequencies(width), _signed_frequencies(height))
    nu = np.arctan2(k2, k1)
    values = multiplier_2d(spec, nu, kernel).astype(complex)
    values[0, 0] = 0.0
    return MultiplierGrid(width=width, height=height, values=values)


@dataclass(frozen=True)
class ImageBuffer:
    """Real 2D grid of samples, row-major (samples[row, col], row = y)."""

    width: int
    height: int
    samples: np.ndarray

    def __post_init__(self):
        s = self.samples
        if s.shape != (self.height, self.width):
            raise ValueError(f"samples shape {s.shape} != (height={self.height}, width={self.width})")
        if not np.all(np.isfinite(s)):
            raise ValueError("image samples must be finite")

    @classmethod
    def from_array(cls, samples) -> "ImageBuffer":
        arr = np.asarray(samples, dtype=float)
        return cls(width=arr.shape[1], height=arr.shape[0], samples=arr)


def filter_image(image: ImageBuffer, spec: Kernel2dSpec, kernel: str = "neglog") -> ImageBuffer:
    """Apply the multiplier by cyclic convolution: F^-1[M . F[u]], real part."""
    grid = build_multiplier_grid(spec, image.width, image.height, kernel)
    out = np.fft.ifft2(np.fft.fft2(image.samples) * grid.values).real
    return ImageBuffer(width=image.width, height=image.height, samples=out)


class Rectangle(NamedTuple):
    """Axis description of one rectangle: center (x, y), size (width, height),
    inclination in radians, additive intensity."""

    center: tuple[float, float]
    size: tuple[float, float]
    inclination: float
    intensity: float


def _as_rectangles(rectangles) -> list[Rectangle]:
    return [r if isinstance(r, Rectangle) else Rectangle(*r) for r in rectangles]


def synthesize_rectangles(width: int, height: int, rectangles: Sequence,
                          supersample: int = 8) -> ImageBuffer:
    """Deterministic scene of additive inclined rectangles.

    Rendered with supersampled coverage so inclined edges are graded rather
    than staircased (pixel (i, j) is centered at x = j, y = i and covers a
    unit square).
    """
    ss = int(supersample)
    img = np.zeros((height * ss, width * ss))
    yy, xx = np.mgrid[0:height * ss, 0:width * ss]
    xs = (xx + 0.5) / ss - 0.5
    ys = (yy + 0.5) / ss - 0.5
    for rect in _as_rectangles(rectangles):
        (cx, cy), (w, h) = rect.center, rect.size
        ca, sa = math.cos(rect.inclination), math.sin(rect.inclination)
        u = (xs - cx) * ca + (ys - cy) * sa
        v = -(xs - cx) * sa + (ys - cy) * ca
        img += rect.intensity * ((np.abs(u) <= w / 2) & (np.abs(v) <= h / 2))
    img = img.reshape(height, ss, width, ss).mean(axis=(1, 3))
    return ImageBuffer(width=width, height=height, samples=img)


def rectangle_geometry(rectangles) -> tuple[list[tuple[float, float]], list]:
    """Ground-truth corner points and edge segments of a rectangle scene."""
    corners, edges = [], []
    for rect in _as_rectangles(rectangles):
        (cx, cy), (w, h) = rect.center, rect.size
        ca, sa = math.cos(rect.inclination), math.sin(rect.inclination)
        quad = []
        for su, sv in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
            u, v = su * w / 2, sv * h / 2
            quad.append((cx + u * ca - v * sa, cy + u * sa + v * ca))
        corners.extend(quad)
        edges.extend((quad[i], quad[(i + 1) % 4]) for i in range(4))
    return corners, edges


def find_extrema(abs_field: np.ndarray, threshold_frac: float = 0.1) -> np.ndarray:
    """(x, y) positions of 8-neighborhood local maxima of |filtered| above
    threshold_frac of the global maximum (plateau interiors excluded)."""
    t = abs_field.max() * threshold_frac
    h, w = abs_field.shape
    core = abs_field[1:-1, 1:-1]
    keep = core >= t
    strictly_above_one = np.zeros_like(keep)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            nb = abs_field[1 + dy:h - 1 + dy, 1 + dx:w - 1 + dx]
            keep &= core >= nb
            strictly_above_one |= core > nb
    keep &= strictly_above_one
    ys, xs = np.nonzero(keep)
    return np.stack([xs + 1, ys + 1], axis=1) if len(xs) else np.empty((0, 2), dtype=int)


def _edge_pixel_mask(shape: tuple[int, int], edges, corners,
                     band: float, corner_exclusion: float) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    mask = np.zeros((h, w), dtype=bool)
    for (x0, y0), (x1, y1) in edges:
        ex, ey = x1 - x0, y1 - y0
        ll = ex * ex + ey * ey
        tt = np.clip(((xx - x0) * ex + (yy - y0) * ey) / ll, 0.0, 1.0)
        d2 = (xx - (x0 + tt * ex)) ** 2 + (yy - (y0 + tt * ey)) ** 2
        mask |= d2 <= band * band
    for (x, y) in corners:
        mask &= (xx - x) ** 2 + (yy - y) ** 2 > corner_exclusion ** 2
    return mask


@dataclass(frozen=True)
class CornerRecord:
    corner: tuple[float, float]
    nearest_extremum: tuple[int, int] | None
    distance: float
    response: float
    ratio: float


@dataclass(frozen=True)
class CornerReport:
    records: tuple[CornerRecord, ...]
    median_edge_response: float
    n_extrema: int
    threshold: float


def corner_response_report(filtered: ImageBuffer, truth_corners: Sequence,
                           edges: Sequence = (), *, threshold_frac: float = 0.1,
                           corner_exclusion: float = 8.0, edge_band: float = 0.75,
                           response_radius: float = 1.5) -> CornerReport:
    """Quantify corner detection on a filtered image.

    For each truth corner: the distance to the nearest detected extremum of
    |filtered| and the corner's response (max |filtered| within
    ``response_radius``) divided by the median |filtered| over edge pixels
    (within ``edge_band`` of the given edge segments, excluding disks around
    the corners).  Without edge segments the ratios are NaN.
    """
    a = np.abs(filtered.samples)
    extrema = find_extrema(a, threshold_frac)
    yy, xx = np.mgrid[0:filtered.height, 0:filtered.width]
    if len(edges):
        emask = _edge_pixel_mask(a.shape, edges, truth_corners, edge_band, corner_exclusion)
        median_edge = float(np.median(a[emask])) if emask.any() else math.nan
    else:
        median_edge = math.nan
    records = []
    for corner in truth_corners:
        x, y = corner
        if len(extrema):
            d = np.hypot(extrema[:, 0] - x, extrema[:, 1] - y)
            i = int(np.argmin(d))
            nearest, distance = (int(extrema[i, 0]), int(extrema[i, 1])), float(d[i])
        else:
            nearest, distance = None, math.inf
        sel = (np.abs(xx - x) <= response_radius) & (np.abs(yy - y) <= response_radius)
        response = float(a[sel].max()) if sel.any() else 0.0
        ratio = response / median_edge if median_edge and not math.isnan(median_edge) else math.nan
        records.append(CornerRecord(corner=(float(x), float(y)), nearest_extremum=nearest,
                                    distance=distance, response=response, ratio=ratio))
    return CornerReport(records=tuple(records), median_edge_response=median_edge,
                        n_extrema=len(extrema), threshold=float(a.max() * threshold_frac))


# --- PGM input/output (binary P5, 8-bit or big-endian 16-bit) ---

def write_pgm(path, image: ImageBuffer, bit_depth: int = 8,
              rescale: bool = True) -> dict:
    """Write a binary PGM; returns the affine rescale metadata.

    With ``rescale`` the samples are mapped affinely onto [0, maxval]; the
    returned dict records ``offset`` and ``scale`` such that
    original ~= stored * scale + offset.
    """
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    maxval = (1 << bit_depth) - 1
    data = image.samples
    if rescale:
        lo, hi = float(data.min()), float(data.max())
        span = hi - lo if hi > lo else 1.0
        stored = np.rint((data - lo) / span * maxval)
        meta = {"offset": lo, "scale": span / maxval, "maxval": maxval,
                "min": lo, "max": hi, "width": image.width, "height": image.height}
    else:
        stored = np.rint(np.clip(data, 0, maxval))
        meta = {"offset": 0.0, "scale": 1.0, "maxval": maxval,
                "min": float(data.min()), "max": float(data.max()),
                "width": image.width, "height": image.height}
    dtype = np.dtype(">u2") if bit_depth == 16 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii"))
        fh.write(stored.astype(dtype).tobytes())
    return meta


def write_pgm_with_sidecar(path, image: ImageBuffer, bit_depth: int = 8,
                           extra: dict | None = None) -> dict:
    """Write a rescaled PGM plus a JSON sidecar with the rescale parameters."""
    meta = write_pgm(path, image, bit_depth=bit_depth, rescale=True)
    if extra:
        meta = {**meta, **extra}
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def read_pgm(path) -> ImageBuffer:
    """Read a binary PGM (8-bit, or 16-bit big-endian)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    # header: magic, width, height, maxval; separated by whitespace/comments
    tokens, pos = [], 0
    while len(tokens) < 4:
        m = re.compile(rb"\s*(#[^\n]*\n)*\s*(\S+)").match(blob, pos)
        if not m:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(m.group(2))
        pos = m.end()
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    pos += 1  # single whitespace byte after maxval
    data = np.frombuffer(blob, dtype=dtype, count=width * height, offset=pos)
    samples = data.reshape(height, width).astype(float)
    return ImageBuffer(width=width, height=height, samples=samples)
