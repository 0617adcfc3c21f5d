"""Analytic evaluation of the transform tensor components and the multiplier.

A monomial kernel component is identified by its multi-index (coordinate
indices, 1-based, one per tensor slot).  Its transform component at a unit
direction xi is a polynomial in the xi coordinates obtained by summing, over
all position subsets S and all perfect matchings M of the complement,

    W(t, n, |S|) * prod_{alpha in S} xi_alpha * prod_{(p,q) in M} (-xi_p xi_q + delta_pq)

where W is the node weight from :mod:`special_functions`.  Two independent
strategies implement this sum: a direct subset-and-matching enumerator (the
reference semantics) and a depth-first pair-replacement recursion that visits
each (subset, matching) node exactly once via a canonical creation order.
The full Fourier multiplier combines the negative-log and sign kernels into
the real and imaginary parts.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import KernelAdmissibilityError, SizeCapError
from .special_functions import CoefficientTable, gamma, sphere_surface

KERNELS = ("sgn", "neglog")

#: Hard cap on the tensor order for the subset/matching enumeration; the term
#: count grows like sum_w C(t,2w) (t-2w-1)!! (~1.4e5 at t = 12).
DEFAULT_ORDER_CAP = 12


@dataclass(frozen=True)
class KernelSpec:
    """One component of a monomial kernel: dimension, multi-index, kernel name."""

    n: int
    component: tuple[int, ...]
    kernel: str

    def __post_init__(self):
        object.__setattr__(self, "component", tuple(int(c) for c in self.component))
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if len(self.component) < 1:
            raise ValueError("component multi-index must have at least one entry")
        if any(not 1 <= c <= self.n for c in self.component):
            raise ValueError(
                f"multi-index entries must lie in 1..{self.n}, got {self.component}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")

    @property
    def t(self) -> int:
        return len(self.component)

    @property
    def multiplicities(self) -> dict[int, int]:
        """Multiplicity map: coordinate index -> number of repeats."""
        return dict(Counter(self.component))


def multi_index_of(mults: dict[int, int]) -> tuple[int, ...]:
    """Canonical (sorted) multi-index of a multiplicity map."""
    return tuple(sorted(itertools.chain.from_iterable(
        [c] * m for c, m in mults.items())))


@dataclass(frozen=True)
class ComponentValue:
    """Value of one transform component; ``normalized`` means divided by S_{n-1}."""

    value: float
    normalized: bool
    parity_zero: bool = False

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"component value must be finite, got {self.value}")


@dataclass(frozen=True)
class MultiplierValue:
    """Fourier multiplier value: re from the -ln kernel, im = -(pi/2) * sgn part."""

    re: float
    im: float

    @property
    def complex_value(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class SubsetTerm:
    """One additive term: level index, surviving positions, complement matching."""

    w: int
    subset: tuple[int, ...]
    matching: tuple[tuple[int, int], ...] = field(default=())


def check_zero_mean(spec: KernelSpec) -> bool:
    """True iff the kernel component integrates to zero over the sphere.

    A monomial has zero spherical mean exactly when at least one coordinate
    appears with odd multiplicity.
    """
    return any(m % 2 for m in spec.multiplicities.values())


def enumerate_subsets(t: int, w: int, parity) -> list[tuple[int, ...]]:
    """All position subsets of {0..t-1} of size 2w (even parity) or 2w+1 (odd).

    Deterministic lexicographic order; each subset exactly once.
    """
    from .special_functions import Parity

    size = 2 * w + (1 if parity is Parity.ODD else 0)
    if not 0 <= size <= t:
        raise ValueError(f"subset size {size} out of range for t={t}")
    return list(itertools.combinations(range(t), size))


def enumerate_matchings(positions) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings of an even-size position set ((m-1)!! of them)."""
    items = list(positions)
    if len(items) % 2:
        raise ValueError(f"perfect matching needs an even number of positions, got {len(items)}")
    return list(_matchings(items))


def _matchings(items: list):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        head = (first, partner)
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield (head,) + tail


def iter_subset_terms(t: int, kernel: str):
    """Yield every SubsetTerm of the expansion, each exactly once (debug/tests)."""
    from .special_functions import Parity

    parity = Parity.ODD if kernel == "sgn" else Parity.EVEN
    w_max = (t - 1) // 2 if kernel == "sgn" else t // 2
    for w in range(w_max + 1):
        for subset in enumerate_subsets(t, w, parity):
            complement = [p for p in range(t) if p not in subset]
            for matching in _matchings(complement):
                yield SubsetTerm(w=w, subset=subset, matching=matching)


def _normalized_direction(xi) -> np.ndarray:
    v = np.asarray(xi, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    return v / norm


def _canonical_coords(spec: KernelSpec) -> list[int]:
    # canonicalize to the sorted representative so permuted multi-indices
    # evaluate bit-identically
    return [c - 1 for c in sorted(spec.component)]


@functools.lru_cache(maxsize=256)
def _table(n: int, t: int, kernel: str) -> CoefficientTable:
    return CoefficientTable.build(n, t, kernel)


def _check_order(t: int, order_cap: int):
    if t > order_cap:
        raise SizeCapError(
            f"tensor order t={t} exceeds the enumeration cap {order_cap}; "
            "raise order_cap explicitly to proceed")


def _parity_mismatch(spec: KernelSpec) -> bool:
    # sgn integrates odd kernels only, -ln even ones; a mismatched component
    # vanishes by the theta -> -theta symmetry of the sphere
    return (spec.t % 2 == 0) == (spec.kernel == "sgn")


def evaluate_component_direct(spec: KernelSpec, xi, *, normalized: bool = True,
                              order_cap: int = DEFAULT_ORDER_CAP) -> ComponentValue:
    """Reference evaluator: explicit sum over subsets and matchings.

    Any nonzero xi is accepted and normalized first (the multiplier depends
    on the direction only).  Terms are accumulated with exact (compensated)
    summation because they cancel heavily near parity zeros.
    """
    if _parity_mismatch(spec):
        return ComponentValue(value=0.0, normalized=normalized, parity_zero=True)
    _check_order(spec.t, order_cap)
    v = _normalized_direction(xi)
    coords = _canonical_coords(spec)
    t = spec.t
    weights = _table(spec.n, t, spec.kernel).entries

    terms = []
    for a, weight in weights.items():
        for subset in itertools.combinations(range(t), a):
            prod_xi = 1.0
            for p in subset:
                prod_xi *= v[coords[p]]
            if prod_xi == 0.0:
                continue
            complement = [p for p in range(t) if p not in subset]
            match_sum = math.fsum(
                _pair_product(matching, coords, v) for matching in _matchings(complement))
            terms.append(weight * prod_xi * match_sum)
    total = math.fsum(terms)
    if not normalized:
        total *= sphere_surface(spec.n)
    return ComponentValue(value=total, normalized=normalized)


def _pair_product(matching, coords, v) -> float:
    out = 1.0
    for p, q in matching:
        cp, cq = coords[p], coords[q]
        out *= -v[cp] * v[cq] + (1.0 if cp == cq else 0.0)
    return out


def evaluate_component_recursive(spec: KernelSpec, xi, *, normalized: bool = True,
                                 order_cap: int = DEFAULT_ORDER_CAP) -> ComponentValue:
    """Fast-path evaluator: depth-first pair replacement.

    Starts from the pure direction-product node (all positions unpaired) and
    repeatedly replaces a pair (xi_p, xi_q) by (-xi_p xi_q + delta_pq),
    accumulating every node's value.  Nodes are deduplicated by requiring
    each new pair's smallest position to exceed the previous pair's, so each
    (subset, matching) contributes exactly once and the result matches the
    direct enumerator to rounding.
    """
    if _parity_mismatch(spec):
        return ComponentValue(value=0.0, normalized=normalized, parity_zero=True)
    _check_order(spec.t, order_cap)
    v = _normalized_direction(xi)
    coords = _canonical_coords(spec)
    weights = _table(spec.n, spec.t, spec.kernel).entries

    xi_of = [v[c] for c in coords]
    terms: list[float] = []

    def visit(free: tuple[int, ...], min_next: int, pair_prod: float):
        prod_xi = 1.0
        for p in free:
            prod_xi *= xi_of[p]
        terms.append(weights[len(free)] * prod_xi * pair_prod)
        for i, p in enumerate(free):
            if p < min_next:
                continue
            for q in free[i + 1:]:
                cp, cq = coords[p], coords[q]
                factor = -xi_of[p] * xi_of[q] + (1.0 if cp == cq else 0.0)
                rest = free[:i] + free[i + 1:]
                rest = tuple(r for r in rest if r != q)
                visit(rest, p + 1, pair_prod * factor)

    visit(tuple(range(spec.t)), 0, 1.0)
    total = math.fsum(terms)
    if not normalized:
        total *= sphere_surface(spec.n)
    return ComponentValue(value=total, normalized=normalized)


def level_partial_sums(spec: KernelSpec, xi, *, normalized: bool = True,
                       order_cap: int = DEFAULT_ORDER_CAP) -> dict[int, float]:
    """Per-level partial sums of the direct enumeration, keyed by subset size.

    Debug view of the additive structure (the level-a slice is the
    contribution carrying a direction factors); their sum is the component.
    """
    if _parity_mismatch(spec):
        return {}
    _check_order(spec.t, order_cap)
    v = _normalized_direction(xi)
    coords = _canonical_coords(spec)
    t = spec.t
    weights = _table(spec.n, t, spec.kernel).entries
    scale = 1.0 if normalized else sphere_surface(spec.n)

    out = {}
    for a, weight in weights.items():
        terms = []
        for subset in itertools.combinations(range(t), a):
            prod_xi = 1.0
            for p in subset:
                prod_xi *= v[coords[p]]
            complement = [p for p in range(t) if p not in subset]
            match_sum = math.fsum(
                _pair_product(matching, coords, v) for matching in _matchings(complement))
            terms.append(weight * prod_xi * match_sum)
        out[a] = scale * math.fsum(terms)
    return out


def assemble_multiplier(n: int, component, xi, *,
                        order_cap: int = DEFAULT_ORDER_CAP) -> MultiplierValue:
    """Full Fourier multiplier of the monomial kernel component at direction xi.

    re is the negative-log part, im is -(pi/2) times the sign part; by the
    antipodal symmetry of the sphere exactly one of them is nonzero for a
    given tensor order.  Raises if the kernel has nonzero spherical mean
    (at least one coordinate must carry odd multiplicity), in which case no
    multiplier exists.
    """
    probe = KernelSpec(n=n, component=tuple(component), kernel="sgn")
    if not check_zero_mean(probe):
        raise KernelAdmissibilityError(
            f"component {tuple(component)} has nonzero spherical mean (all "
            "multiplicities even); the singular transform requires a zero-mean kernel")
    if probe.t % 2 == 1:
        sgn = evaluate_component_direct(probe, xi, normalized=False, order_cap=order_cap)
        return MultiplierValue(re=0.0, im=-(math.pi / 2.0) * sgn.value)
    neglog = KernelSpec(n=n, component=tuple(component), kernel="neglog")
    re = evaluate_component_direct(neglog, xi, normalized=False, order_cap=order_cap)
    return MultiplierValue(re=re.value, im=0.0)


def riesz_normalization(n: int) -> float:
    """Classical first-order normalization Gamma((n+1)/2) / pi^((n+1)/2).

    Multiplying the assembled order-1 multiplier by this constant yields
    exactly -i xi_i, the textbook first-order transform.
    """
    return gamma((n + 1) / 2) / math.pi ** ((n + 1) / 2)


def evaluate_all_components(n: int, t: int, kernel: str, xi, *,
                            max_components: int = 250_000,
                            order_cap: int = DEFAULT_ORDER_CAP,
                            method: str = "direct") -> dict[tuple[int, ...], ComponentValue]:
    """Evaluate every component of the order-t tensor, exploiting symmetry.

    Components are permutation symmetric, so only one representative per
    multiplicity class (a multiset of coordinates) is evaluated; the result
    maps every multi-index, expanded over all orderings, to its value.
    """
    if n ** t > max_components:
        raise SizeCapError(
            f"component space n^t = {n ** t} exceeds cap {max_components}")
    try:
        evaluate = {"direct": evaluate_component_direct,
                    "recursive": evaluate_component_recursive}[method]
    except KeyError:
        raise ValueError(f"method must be 'direct' or 'recursive', got {method!r}") from None
    out: dict[tuple[int, ...], ComponentValue] = {}
    for rep in itertools.combinations_with_replacement(range(1, n + 1), t):
        spec = KernelSpec(n=n, component=rep, kernel=kernel)
        value = evaluate(spec, xi, order_cap=order_cap)
        for perm in _distinct_permutations(rep):
            out[perm] = value
    return out


def _distinct_permutations(rep: tuple[int, ...]):
    # multiset permutations without the t! blowup of itertools.permutations
    counts = Counter(rep)
    keys = sorted(counts)

    def emit(prefix: list[int], remaining: int):
        if remaining == 0:
            yield tuple(prefix)
            return
        for k in keys:
            if counts[k] > 0:
                counts[k] -= 1
                prefix.append(k)
                yield from emit(prefix, remaining - 1)
                prefix.pop()
                counts[k] += 1

    yield from emit([], len(rep))
