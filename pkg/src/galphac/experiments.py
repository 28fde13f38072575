"""Parameter sweeps, figure data, randomized bound checks and ordering scans."""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import measures as ms
from . import states
from .bipartitions import enumerate_bipartitions
from .core import pure_trace_distance, reduced_spectrum, trace_distance
from .errors import InvalidArgumentError
from .measures import MeasureId

MeasureSpec = tuple[MeasureId, Optional[float]]

DEFAULT_STEP = 1e-3
FIG4_MEASURES: list[MeasureSpec] = [
    (MeasureId.GQC, 3.0),
    (MeasureId.GALPHAC, 0.5),
    (MeasureId.GMC, None),
    (MeasureId.GGM, None),
]
FIG4_PEAKS = {"gqc(q=3)": 0.843, "galphac(alpha=0.5)": 0.866, "gmc": 1.199, "ggm": 1.271}


def parse_measure(text: str, alpha: float = 0.5, q: float = 3.0) -> MeasureSpec:
    """``galphac``, ``galphac(alpha=0.25)``, ``gqc(q=3)``, ``gmc``, ``ggm`` or ``fill``.

    Bare ``galphac``/``gqc`` take their parameter from ``alpha``/``q``.
    """
    m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*(\w+)\s*=\s*([^)]+)\))?\s*", text)
    if not m:
        raise InvalidArgumentError(f"cannot parse measure {text!r}")
    name, key, value = m.groups()
    try:
        mid = MeasureId(name.lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown measure {name!r}") from None
    if mid is MeasureId.GALPHAC:
        if key not in (None, "alpha"):
            raise InvalidArgumentError(f"galphac takes alpha, not {key}")
        return mid, ms.check_alpha(float(value) if value else alpha)
    if mid is MeasureId.GQC:
        if key not in (None, "q"):
            raise InvalidArgumentError(f"gqc takes q, not {key}")
        return mid, ms.check_q(float(value) if value else q)
    if key is not None:
        raise InvalidArgumentError(f"{mid.value} takes no parameter")
    return mid, None


def evaluate_all(state, measure_specs: Sequence[MeasureSpec]) -> list[float]:
    """Aggregates for several measures, sharing one set of cut spectra."""
    spectra = ms.cut_spectra(state)
    out = []
    for mid, param in measure_specs:
        if mid is MeasureId.FILL:
            out.append(ms.concurrence_fill(state))
        else:
            out.append(ms.evaluate(spectra, mid, param))
    return out


def theta_grid(start: float = 0.0, end: float = math.pi / 2, step: float = DEFAULT_STEP) -> np.ndarray:
    """``start, start+step, ...`` up to ``end`` inclusive, computed by index (no drift)."""
    if step <= 0:
        raise InvalidArgumentError(f"step must be positive, got {step}")
    if start < 0 or end > math.pi / 2 + 1e-12 or end < start:
        raise InvalidArgumentError(f"theta range [{start}, {end}] must lie within [0, pi/2]")
    count = int(math.floor((end - start) / step + 1e-9))
    return start + step * np.arange(count + 1)


@dataclass
class SweepResult:
    family: str
    thetas: np.ndarray
    columns: dict[str, np.ndarray]
    argmax: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.argmax:
            for tag, col in self.columns.items():
                i = int(np.argmax(col))
                self.argmax[tag] = (float(self.thetas[i]), float(col[i]))

    def rows(self) -> list[list[float]]:
        cols = list(self.columns.values())
        return [[float(t)] + [float(c[i]) for c in cols] for i, t in enumerate(self.thetas)]


def sweep(family: str, measure_specs: Sequence[MeasureSpec], thetas: Iterable[float]) -> SweepResult:
    if family not in states.THETA_FAMILIES:
        raise InvalidArgumentError(
            f"sweeps need a theta family ({', '.join(states.THETA_FAMILIES)}), got {family!r}"
        )
    build = states.THETA_FAMILIES[family]
    thetas = np.asarray(list(thetas), dtype=float)
    values = np.array([evaluate_all(build(t), measure_specs) for t in thetas])
    tags = [ms.measure_tag(mid, p) for mid, p in measure_specs]
    return SweepResult(family, thetas, {tag: values[:, i] for i, tag in enumerate(tags)})


# --- figure data --------------------------------------------------------------


def fig1_rows(alpha: float = 1 / 3, ns: Iterable[int] = range(5, 22)) -> list[tuple[int, float, float, float]]:
    """``(n, G(W_n), G(GHZ_n), ratio)`` from the closed forms."""
    rows = []
    for n in ns:
        gw = ms.w_alpha_c_analytic(n, alpha)
        gg = ms.ghz_alpha_c_analytic(n, alpha)
        rows.append((n, gw, gg, gw / gg))
    return rows


def type_ab_curves(other: MeasureSpec, thetas: Sequence[float], alpha: float = 0.5) -> dict[str, np.ndarray]:
    """``other`` and GαC along both three-qubit families, keyed ``<measure>_A`` etc."""
    specs = [other, (MeasureId.GALPHAC, alpha)]
    out: dict[str, np.ndarray] = {}
    for fam, label in (("typeA", "A"), ("typeB", "B")):
        res = sweep(fam, specs, thetas)
        for tag, col in res.columns.items():
            out[f"{tag}_{label}"] = col
    return out


def fig4_sweep(step: float = DEFAULT_STEP) -> SweepResult:
    return sweep("fam4", FIG4_MEASURES, theta_grid(0.0, math.pi / 2, step))


# --- ordering scans -----------------------------------------------------------


@dataclass(frozen=True)
class CrossingPair:
    theta_a: float
    theta_b: float
    match_diff: float
    split_diff: float


def find_crossing_pair(
    thetas: Sequence[float],
    match_a: Sequence[float],
    split_a: Sequence[float],
    match_b: Sequence[float],
    split_b: Sequence[float],
    match_tol: float = 1e-4,
    split_min: float = 0.01,
) -> Optional[CrossingPair]:
    """Grid points ``(t_A, t_B)`` equal on one measure but separated on another.

    Among all pairs with ``|match_A - match_B| <= match_tol`` returns the one
    with the largest ``|split_A - split_B|``, provided it reaches ``split_min``.
    """
    thetas = np.asarray(thetas)
    order = np.argsort(match_b, kind="stable")
    keys = np.asarray(match_b)[order]
    best: Optional[CrossingPair] = None
    for i, (xa, ga) in enumerate(zip(match_a, split_a)):
        lo = bisect.bisect_left(keys, xa - match_tol)
        hi = bisect.bisect_right(keys, xa + match_tol)
        for j in order[lo:hi]:
            d = abs(ga - split_b[j])
            if d >= split_min and (best is None or d > best.split_diff):
                best = CrossingPair(float(thetas[i]), float(thetas[j]), float(abs(xa - match_b[j])), float(d))
    return best


def segment(thetas: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Indices of grid points strictly inside ``(lo, hi)``."""
    return np.flatnonzero((thetas > lo) & (thetas < hi))


def strictly_monotone(values: np.ndarray, increasing: bool) -> bool:
    d = np.diff(values)
    return bool(np.all(d > 0) if increasing else np.all(d < 0))


def kink_ratio(values: np.ndarray, index: int, window: int = 50, near: int = 2) -> float:
    """Largest ``|second difference|`` within ``near`` points of ``index``, over the
    median ``|second difference|`` in a ``window`` around it.

    A slope discontinuity gives a ratio of order ``1/step``; a smooth maximum
    keeps it of order 1.
    """
    d2 = np.abs(np.diff(values, 2))
    c = index - 1
    lo, hi = max(0, c - window), min(d2.size, c + window + 1)
    local = d2[max(0, c - near) : min(d2.size, c + near + 1)]
    base = np.median(d2[lo:hi])
    return float(local.max() / base) if base > 0 else math.inf


# --- continuity bound harness ---------------------------------------------------


@dataclass
class BoundCheck:
    dims: tuple[int, ...]
    alpha: float
    trials: int
    cut_checks: int = 0
    cut_violations: int = 0
    aggregate_violations: int = 0
    max_cut_ratio: float = 0.0
    max_aggregate_ratio: float = 0.0
    max_epsilon_gap: float = 0.0
    # "proved" for odd n, "extension" for even n (half-weighted middle class)
    aggregate_bound_form: str = "none"

    @property
    def ok(self) -> bool:
        return self.cut_violations == 0 and self.aggregate_violations == 0

    def summary(self) -> str:
        return (
            f"dims={'x'.join(map(str, self.dims))} alpha={self.alpha:g} trials={self.trials} "
            f"cut_violations={self.cut_violations}/{self.cut_checks} "
            f"aggregate_violations={self.aggregate_violations} "
            f"max_cut_slack={self.max_cut_ratio:.6f} max_aggregate_slack={self.max_aggregate_ratio:.6f} "
            f"aggregate_bound={self.aggregate_bound_form}"
        )


# observed differences are compared with this much rounding allowance
BOUND_SLACK = 1e-12


def bound_check(
    trials: int,
    seed: int,
    dims: Sequence[int],
    alpha: float,
    eps_range: tuple[float, float] = (1e-6, 2.0),
) -> BoundCheck:
    """Random (state, perturbation) pairs against the per-cut and aggregate continuity bounds.

    ``epsilon`` is drawn log-uniformly from ``eps_range``; the bound is then
    evaluated at the projector trace distance actually measured.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    alpha = ms.check_alpha(alpha)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    rng = np.random.default_rng(seed)
    out = BoundCheck(dims, alpha, trials)
    multipartite = n >= 3
    if multipartite:
        out.aggregate_bound_form = "proved" if n % 2 else "extension"
    class_dims = ms.class_min_dims(dims) if multipartite else None
    total = math.prod(dims)
    lo, hi = np.log(eps_range[0]), np.log(eps_range[1])
    for _ in range(trials):
        psi = states.random_pure(dims, rng)
        target = float(np.exp(rng.uniform(lo, hi)))
        phi = states.perturb(psi, target, rng)
        eps = trace_distance(psi, phi)
        out.max_epsilon_gap = max(out.max_epsilon_gap, abs(eps - pure_trace_distance(psi, phi)))
        parts = enumerate_bipartitions(n)
        for b in parts:
            s1, s2 = reduced_spectrum(psi, b), reduced_spectrum(phi, b)
            diff = abs(ms.alpha_concurrence(s1, alpha) - ms.alpha_concurrence(s2, alpha))
            ds = math.prod(dims[p] for p in b.parties)
            bound = ms.continuity_bound_bipartite(eps, min(ds, total // ds), alpha)
            out.cut_checks += 1
            if diff > bound + BOUND_SLACK:
                out.cut_violations += 1
            if bound > 0:
                out.max_cut_ratio = max(out.max_cut_ratio, diff / bound)
        if multipartite:
            diff = abs(ms.galpha_c(psi, alpha).aggregate - ms.galpha_c(phi, alpha).aggregate)
            bound = ms.continuity_bound_multipartite(eps, n, class_dims, alpha)
            if diff > bound + BOUND_SLACK:
                out.aggregate_violations += 1
            if bound > 0:
                out.max_aggregate_ratio = max(out.max_aggregate_ratio, diff / bound)
    return out
