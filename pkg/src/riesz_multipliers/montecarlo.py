"""Monte-Carlo sphere integration of the transform components.

Three sampling schemes estimate T/S_{n-1} = mean over the sphere of
f(theta) g(xi . theta):

* MC1 (Muller): normalize a vector of independent standard normals; uniform
  on the sphere in any dimension.
* MC2 (spherical): draw the two spherical angles uniformly (3-d only).
  Uniform angles oversample the poles, so the estimator carries explicit
  sin(theta) importance weights; the unweighted "literal" variant is kept
  behind a flag to document its bias.
* MC3 (Halton): the same angle construction fed by the plain radical-inverse
  Halton sequence (base 3 for the polar angle, base 2 for the azimuth),
  starting at index 1.

Streams replay deterministically from (kind, seed, n) and can be split into
disjoint substreams whose partial sums combine associatively.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedDimensionError
from .multiplier import KernelSpec, evaluate_component_direct

_CHUNK = 1 << 20


class SamplerKind(enum.Enum):
    MC1_MULLER = "mc1"
    MC2_SPHERICAL = "mc2"
    MC3_HALTON = "mc3"

    @classmethod
    def parse(cls, name: str) -> "SamplerKind":
        name = name.lower()
        for kind in cls:
            if name in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown sampler {name!r}; expected mc1, mc2 or mc3")


@dataclass
class SampleStream:
    """Deterministic, replayable stream of sphere points with weights.

    MC3 substreams select every ``stride``-th Halton index starting at
    ``1 + offset``; MC1/MC2 substreams derive child seeds from the parent.
    """

    kind: SamplerKind
    seed: int
    n: int
    emitted: int = 0
    stride: int = 1
    offset: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if self.kind is not SamplerKind.MC1_MULLER and self.n != 3:
            raise UnsupportedDimensionError(
                f"{self.kind.name} draws the two spherical angles and only "
                f"supports n = 3, got n = {self.n}")
        self._rng = np.random.default_rng(self._seed_seq())

    def _seed_seq(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(self.offset,) if self.offset else ())

    def draw(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Next ``count`` points and weights; advances the stream."""
        if self.kind is SamplerKind.MC1_MULLER:
            points = _muller_batch(self._rng, count, self.n)
            weights = np.ones(count)
        else:
            if self.kind is SamplerKind.MC2_SPHERICAL:
                u = self._rng.random((count, 2))
                theta, phi = math.pi * u[:, 0], 2.0 * math.pi * u[:, 1]
            else:
                idx = 1 + self.offset + self.stride * (self.emitted + np.arange(count, dtype=np.int64))
                theta = math.pi * radical_inverse(idx, 3)
                phi = 2.0 * math.pi * radical_inverse(idx, 2)
            points = _angles_to_points(theta, phi)
            weights = 0.5 * math.pi * np.sin(theta)
        self.emitted += count
        return points, weights

    def split(self, k: int) -> list["SampleStream"]:
        """Partition into k disjoint substreams (index striding for MC3,
        seed derivation otherwise)."""
        if k < 1:
            raise ValueError(f"need k >= 1, got {k}")
        if self.kind is SamplerKind.MC3_HALTON:
            return [SampleStream(kind=self.kind, seed=self.seed, n=self.n,
                                 stride=self.stride * k,
                                 offset=self.offset + i * self.stride)
                    for i in range(k)]
        return [SampleStream(kind=self.kind, seed=self.seed, n=self.n, offset=i + 1)
                for i in range(k)]


def _muller_batch(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    points = rng.standard_normal((count, n))
    norms = np.linalg.norm(points, axis=1)
    bad = norms < 1e-300  # all-zero draw has probability 0; redraw defensively
    while np.any(bad):
        points[bad] = rng.standard_normal((int(bad.sum()), n))
        norms[bad] = np.linalg.norm(points[bad], axis=1)
        bad = norms < 1e-300
    return points / norms[:, None]


def _angles_to_points(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)


def radical_inverse(indices, base: int) -> np.ndarray:
    """Van der Corput radical inverse of the given indices in the given base."""
    i = np.asarray(indices, dtype=np.int64)
    out = np.zeros(i.shape)
    f = 1.0 / base
    while np.any(i > 0):
        out += f * (i % base)
        i = i // base
        f /= base
    return out


def muller_point(stream: SampleStream) -> np.ndarray:
    """Next uniform sphere point of an MC1 stream."""
    if stream.kind is not SamplerKind.MC1_MULLER:
        raise ValueError("muller_point requires an MC1 stream")
    points, _ = stream.draw(1)
    return points[0]


def spherical_point(stream: SampleStream) -> tuple[np.ndarray, float]:
    """Next (point, weight) of an MC2 stream."""
    if stream.kind is not SamplerKind.MC2_SPHERICAL:
        raise ValueError("spherical_point requires an MC2 stream")
    points, weights = stream.draw(1)
    return points[0], float(weights[0])


def halton_point(stream: SampleStream) -> tuple[np.ndarray, float]:
    """Next (point, weight) of an MC3 stream."""
    if stream.kind is not SamplerKind.MC3_HALTON:
        raise ValueError("halton_point requires an MC3 stream")
    points, weights = stream.draw(1)
    return points[0], float(weights[0])


def sample_sphere(kind: SamplerKind, n: int, count: int, seed: int = 0
                  ) -> tuple[np.ndarray, np.ndarray]:
    """One-shot (points, weights) batch; equivalent to a fresh stream's first draws."""
    return SampleStream(kind=kind, seed=seed, n=n).draw(count)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.std_error < 0 or self.n_samples < 2:
            raise ValueError("std_error must be >= 0 and n_samples >= 2")


def integrand_values(points: np.ndarray, weights: np.ndarray,
                     spec: KernelSpec, xi, *, literal: bool = False) -> np.ndarray:
    """Per-point weighted integrand w * f(theta) * g(xi . theta)."""
    v = np.asarray(xi, dtype=float)
    v = v / np.linalg.norm(v)
    f = np.ones(len(points))
    for c in spec.component:
        f = f * points[:, c - 1]
    dots = points @ v
    if spec.kernel == "sgn":
        g = np.sign(dots)
    else:
        with np.errstate(divide="ignore"):
            g = -np.log(np.abs(dots))
        g[~np.isfinite(g)] = 0.0  # measure-zero grazing points
    values = f * g
    if not literal:
        values = weights * values
    return values


def estimate(spec: KernelSpec, xi, kind: SamplerKind, n_samples: int,
             seed: int = 0, *, literal: bool = False) -> McEstimate:
    """Monte-Carlo estimate of T/S_{n-1} with the sample standard error.

    Deterministic in (kind, seed, n_samples).  ``literal`` switches MC2/MC3
    to the unweighted uniform-angle estimator, which is biased; it exists to
    document that bias.  For MC3 the reported standard error is computed
    from the sample variance even though quasi-random points are not
    independent, so it is an i.i.d.-style proxy, not a rigorous bound.
    """
    if n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {n_samples}")
    stream = SampleStream(kind=kind, seed=seed, n=spec.n)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        count = min(_CHUNK, n_samples - done)
        points, weights = stream.draw(count)
        values = integrand_values(points, weights, spec, xi, literal=literal)
        total += float(values.sum())
        total_sq += float((values * values).sum())
        done += count
    mean = total / n_samples
    var = max(0.0, (total_sq - n_samples * mean * mean) / (n_samples - 1))
    return McEstimate(mean=mean, std_error=math.sqrt(var / n_samples), n_samples=n_samples)


def estimate_from_points(points: np.ndarray, weights: np.ndarray,
                         spec: KernelSpec, xi) -> McEstimate:
    """Estimate from a pre-drawn batch (lets callers reuse one point set)."""
    values = integrand_values(points, weights, spec, xi)
    n = len(values)
    mean = float(values.mean())
    return McEstimate(mean=mean, std_error=float(values.std(ddof=1) / math.sqrt(n)),
                      n_samples=n)


@dataclass(frozen=True)
class ConvergenceRow:
    n_samples: int
    mean_abs_error: float


@dataclass(frozen=True)
class ConvergenceStudy:
    kind: SamplerKind
    rows: tuple[ConvergenceRow, ...]
    loglog_slope: float


def convergence_study(spec: KernelSpec, xi, kind: SamplerKind, n_list,
                      repeats: int = 20, seed: int = 0) -> ConvergenceStudy:
    """Mean absolute error against the analytic value for each sample count.

    MC1/MC2 repeats use derived seeds; MC3 repeats shift the Halton start
    index (the sequence itself is deterministic).  The log-log slope of the
    error versus N is reported; independent sampling follows N^(-1/2).
    """
    n_list = [int(n) for n in n_list]
    if sorted(n_list) != n_list:
        raise ValueError("n_list must be ascending")
    exact = evaluate_component_direct(spec, xi).value
    rows = []
    offset_base = max(n_list)
    for n_samples in n_list:
        errors = []
        for r in range(repeats):
            if kind is SamplerKind.MC3_HALTON:
                stream = SampleStream(kind=kind, seed=seed, n=spec.n,
                                      offset=r * offset_base)
                points, weights = stream.draw(n_samples)
                mean = float(np.mean(integrand_values(points, weights, spec, xi)))
            else:
                mean = estimate(spec, xi, kind, n_samples, seed=seed + r).mean
            errors.append(abs(mean - exact))
        rows.append(ConvergenceRow(n_samples=n_samples, mean_abs_error=float(np.mean(errors))))
    slope = float(np.polyfit(np.log([r.n_samples for r in rows]),
                             np.log([max(r.mean_abs_error, 1e-300) for r in rows]), 1)[0])
    return ConvergenceStudy(kind=kind, rows=tuple(rows), loglog_slope=slope)
