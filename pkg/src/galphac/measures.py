"""Bipartite kernels and genuine multipartite entanglement measures.

Spectrum-level kernels (one cut):

* alpha-concurrence  ``Tr rho^alpha - 1``, ``0 <= alpha <= 1/2``
* q-concurrence      ``1 - Tr rho^q``, ``q >= 2``
* concurrence        ``sqrt(2 (1 - Tr rho^2))``

State-level measures aggregate a kernel over every bipartition: GαC and GqC
take the geometric mean, GMC and GGM the minimum. Geometric means are
evaluated in log space and are exactly 0 as soon as one cut vanishes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bipartitions import Bipartition, cardinality, enumerate_bipartitions, size_classes
from .core import ZERO_TOL, PureState, Spectrum, SpectrumLike, as_spectrum, reduced_spectrum
from .errors import InvalidArgumentError, InvalidParameterError, NotMultipartiteError


class MeasureId(str, enum.Enum):
    GALPHAC = "galphac"
    GQC = "gqc"
    GMC = "gmc"
    GGM = "ggm"
    FILL = "fill"


FORMULAS = {
    MeasureId.GALPHAC: "geometric mean over all c(n)=2^(n-1)-1 cuts of (Tr rho_S^alpha - 1)",
    MeasureId.GQC: "geometric mean over all cuts of (1 - Tr rho_S^q)",
    MeasureId.GMC: "min over cuts of sqrt(d/(d-1) (1 - Tr rho_S^2)), d = min(dim S, dim S')",
    MeasureId.GGM: "min over cuts of (1 - largest eigenvalue of rho_S)",
    MeasureId.FILL: "[16/3 Q(Q-x1)(Q-x2)(Q-x3)]^(1/4), x_k = 2(1 - Tr rho_k^2), Q = (x1+x2+x3)/2",
}


def measure_tag(measure: MeasureId | str, parameter: Optional[float] = None) -> str:
    """Identifier used in CSV/JSON output, e.g. ``galphac(alpha=0.5)`` or ``gmc``."""
    mid = MeasureId(measure)
    if mid is MeasureId.GALPHAC:
        return f"galphac(alpha={parameter:g})"
    if mid is MeasureId.GQC:
        return f"gqc(q={parameter:g})"
    return mid.value


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 0.5:
        raise InvalidParameterError(f"alpha must lie in [0, 1/2], got {alpha}")
    return alpha


def check_q(q: float) -> float:
    q = float(q)
    if not q >= 2.0:
        raise InvalidParameterError(f"q must be >= 2, got {q}")
    return q


# --- spectrum-level kernels -------------------------------------------------


def alpha_concurrence(spec: SpectrumLike, alpha: float) -> float:
    """``sum_i lambda_i**alpha - 1`` over the nonzero eigenvalues.

    At ``alpha = 0`` each nonzero eigenvalue contributes 1, giving ``rank - 1``.
    """
    alpha = check_alpha(alpha)
    lam = as_spectrum(spec).nonzero()
    if alpha == 0.0:
        return float(lam.size - 1)
    return max(0.0, float(np.sum(lam**alpha)) - 1.0)


def q_concurrence(spec: SpectrumLike, q: float) -> float:
    q = check_q(q)
    lam = as_spectrum(spec).nonzero()
    return max(0.0, 1.0 - float(np.sum(lam**q)))


def concurrence(spec: SpectrumLike, normalized: bool = False) -> float:
    """Pure-state concurrence ``sqrt(2 (1 - Tr rho^2))`` of one cut.

    With ``normalized=True`` the prefactor 2 becomes ``d/(d-1)``, where ``d``
    is the spectrum length (the smaller side's dimension), so that every cut
    has maximum 1. The two coincide for qubit cuts.
    """
    s = as_spectrum(spec)
    linear = max(0.0, 1.0 - float(np.sum(s.values**2)))
    d = len(s)
    if normalized:
        if d < 2:
            return 0.0
        return math.sqrt(d / (d - 1) * linear)
    return math.sqrt(2.0 * linear)


def max_alpha_concurrence(d: int, alpha: float) -> float:
    """Upper end ``d**(1-alpha) - 1`` of the alpha-concurrence range for rank ``d``."""
    return d ** (1.0 - check_alpha(alpha)) - 1.0


# --- aggregation -------------------------------------------------------------


@dataclass(frozen=True)
class GmeReport:
    """Per-cut values of one measure and their aggregate.

    ``product`` is the product of the per-cut values (only for the geometric
    mean measures); it may underflow to 0 for many parties even when
    ``aggregate`` is positive.
    """

    measure_id: MeasureId
    parameter: Optional[float]
    per_cut: dict[Bipartition, float]
    aggregate: float
    product: Optional[float] = None

    @property
    def tag(self) -> str:
        return measure_tag(self.measure_id, self.parameter)

    @property
    def n_cuts(self) -> int:
        return len(self.per_cut)

    def to_dict(self) -> dict:
        out = {
            "measure": self.tag,
            "aggregate": self.aggregate,
            "per_cut": {b.label(): v for b, v in self.per_cut.items()},
        }
        if self.product is not None:
            out["product"] = self.product
        return out


def geometric_mean(values: Sequence[float], root: Optional[int] = None) -> float:
    """``(prod values)**(1/root)`` via a log-sum in input order; 0 if any value <= ZERO_TOL."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise InvalidArgumentError("geometric mean of no values")
    if np.any(vals <= ZERO_TOL):
        return 0.0
    root = vals.size if root is None else root
    return math.exp(math.fsum(np.log(vals)) / root)


def _clamp(v: float) -> float:
    if v < -ZERO_TOL:
        raise ArithmeticError(f"negative per-cut value {v}")
    return max(0.0, float(v))


def cut_spectra(state: PureState) -> dict[Bipartition, Spectrum]:
    """Reduced spectrum of side ``S`` for every canonical cut, in enumeration order."""
    n = state.n_parties
    if n < 3:
        raise NotMultipartiteError(
            f"genuine multipartite measures need >= 3 parties, got {n}; "
            "use the bipartite kernels for two parties"
        )
    return {b: reduced_spectrum(state, b) for b in enumerate_bipartitions(n)}


def _spectra(state_or_spectra) -> dict[Bipartition, Spectrum]:
    if isinstance(state_or_spectra, PureState):
        return cut_spectra(state_or_spectra)
    return state_or_spectra


def _geometric_report(mid, param, spectra, kernel: Callable[[Spectrum], float]) -> GmeReport:
    per_cut = {b: _clamp(kernel(s)) for b, s in spectra.items()}
    vals = list(per_cut.values())
    n = next(iter(per_cut)).n
    c = cardinality(n)
    agg = geometric_mean(vals, c)
    if agg == 0.0:
        prod_ = 0.0
    else:
        prod_ = math.exp(math.fsum(math.log(v) for v in vals))
    return GmeReport(mid, param, per_cut, agg, prod_)


def _min_report(mid, spectra, kernel: Callable[[Spectrum], float]) -> GmeReport:
    per_cut = {b: _clamp(kernel(s)) for b, s in spectra.items()}
    return GmeReport(mid, None, per_cut, min(per_cut.values()))


def galpha_c(state, alpha: float) -> GmeReport:
    """Geometric mean of the alpha-concurrence over all bipartitions.

    ``state`` may also be a precomputed :func:`cut_spectra` mapping, which lets
    callers evaluate several parameters without repeating the SVDs.
    """
    alpha = check_alpha(alpha)
    return _geometric_report(
        MeasureId.GALPHAC, alpha, _spectra(state), lambda s: alpha_concurrence(s, alpha)
    )


def gqc(state, q: float) -> GmeReport:
    q = check_q(q)
    return _geometric_report(MeasureId.GQC, q, _spectra(state), lambda s: q_concurrence(s, q))


def gmc(state) -> GmeReport:
    """Genuine multipartite concurrence: the smallest per-cut concurrence.

    Per-cut concurrence is normalized by the cut dimension (see
    :func:`concurrence`), which only matters for cuts whose smaller side is
    larger than a qubit.
    """
    return _min_report(MeasureId.GMC, _spectra(state), lambda s: concurrence(s, normalized=True))


def ggm(state) -> GmeReport:
    """Generalized geometric measure: ``min over cuts of (1 - largest Schmidt weight)``."""
    return _min_report(MeasureId.GGM, _spectra(state), lambda s: 1.0 - float(s.values[0]))


def concurrence_fill(state: PureState) -> float:
    """Area of the concurrence triangle of a three-qubit pure state (Heron form).

    The triangle sides are the squared one-vs-rest concurrences; the area is
    rescaled so that GHZ gives 1.
    """
    if tuple(state.local_dims) != (2, 2, 2):
        raise InvalidArgumentError(f"concurrence fill needs three qubits, got dims {state.local_dims}")
    x = [concurrence(reduced_spectrum(state, [k])) ** 2 for k in range(3)]
    Q = sum(x) / 2.0
    radicand = 16.0 / 3.0 * Q * (Q - x[0]) * (Q - x[1]) * (Q - x[2])
    return max(0.0, radicand) ** 0.25


def evaluate(state, measure: MeasureId | str, parameter: Optional[float] = None) -> float:
    """Aggregate value of ``measure`` on ``state`` (a state or its cut spectra)."""
    mid = MeasureId(measure)
    if mid is MeasureId.GALPHAC:
        return galpha_c(state, parameter).aggregate
    if mid is MeasureId.GQC:
        return gqc(state, parameter).aggregate
    if mid is MeasureId.GMC:
        return gmc(state).aggregate
    if mid is MeasureId.GGM:
        return ggm(state).aggregate
    if not isinstance(state, PureState):
        raise InvalidArgumentError("concurrence fill needs the state itself")
    return concurrence_fill(state)


def report(state: PureState, measure: MeasureId | str, parameter: Optional[float] = None) -> GmeReport:
    """Full :class:`GmeReport`; the fill is reported with its three one-vs-rest cuts."""
    mid = MeasureId(measure)
    if mid is MeasureId.GALPHAC:
        return galpha_c(state, parameter)
    if mid is MeasureId.GQC:
        return gqc(state, parameter)
    if mid is MeasureId.GMC:
        return gmc(state)
    if mid is MeasureId.GGM:
        return ggm(state)
    value = concurrence_fill(state)
    per_cut = {
        Bipartition(3, (k,)): concurrence(reduced_spectrum(state, [k])) ** 2 for k in range(3)
    }
    return GmeReport(mid, None, per_cut, value)


# --- closed forms ------------------------------------------------------------


def _check_n3(n: int) -> None:
    if int(n) != n or n < 3:
        raise NotMultipartiteError(f"closed forms need n >= 3, got {n!r}")


def ghz_alpha_c_analytic(n: int, alpha: float) -> float:
    """GαC of the n-qubit GHZ state, ``2**(1-alpha) - 1`` for every n."""
    _check_n3(n)
    return 2.0 ** (1.0 - check_alpha(alpha)) - 1.0


def w_cut_alpha_c(n: int, k: int, alpha: float) -> float:
    """alpha-concurrence of the n-qubit W state across a ``k`` vs ``n-k`` cut."""
    alpha = check_alpha(alpha)
    if alpha == 0.0:
        return 1.0
    return (k / n) ** alpha + ((n - k) / n) ** alpha - 1.0


def w_alpha_c_analytic(n: int, alpha: float) -> float:
    """GαC of the n-qubit W state from its cut classes, evaluated in log space.

    Every k-party cut of W_n has spectrum ``{k/n, (n-k)/n}``; class ``k`` holds
    ``C(n, k)`` cuts, halved for ``k = n/2``.
    """
    _check_n3(n)
    alpha = check_alpha(alpha)
    terms = []
    for k, weight in size_classes(n):
        v = w_cut_alpha_c(n, k, alpha)
        if v <= ZERO_TOL:
            return 0.0
        terms.append(weight * math.log(v))
    return math.exp(math.fsum(terms) / cardinality(n))


# --- continuity bounds -------------------------------------------------------


def continuity_bound_bipartite(epsilon: float, d: int, alpha: float) -> float:
    """``epsilon**alpha * d**(1-alpha)``, the largest change of the alpha-concurrence
    between two pure states whose projectors are ``epsilon`` apart in trace norm,
    with ``d`` the reduced-state dimension."""
    alpha = check_alpha(alpha)
    if epsilon < 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon}")
    if d < 1:
        raise InvalidArgumentError(f"d must be >= 1, got {d}")
    if epsilon == 0:
        return 0.0
    return epsilon**alpha * d ** (1.0 - alpha)


def continuity_bound_multipartite(
    epsilon: float, n: int, cut_min_dims: Sequence[int], alpha: float
) -> float:
    """Bound on the change of GαC for ``epsilon``-close pure states.

    ``cut_min_dims[i]`` is the smaller-side dimension for cuts with ``|S| = i+1``.
    For even ``n`` the balanced class enters with half its binomial weight,
    mirroring the cut count; this even-n form is an extension, the odd-n form
    is the established one.
    """
    if epsilon < 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon}")
    classes = size_classes(n)
    if len(cut_min_dims) != len(classes):
        raise InvalidArgumentError(
            f"n={n} has {len(classes)} cut-size classes, got {len(cut_min_dims)} dimensions"
        )
    total = math.fsum(
        w * continuity_bound_bipartite(epsilon, d, alpha) for (_, w), d in zip(classes, cut_min_dims)
    )
    return total ** (1.0 / cardinality(n))


def class_min_dims(local_dims: Sequence[int]) -> list[int]:
    """Per cut-size class, the largest ``min(dim S, dim S̄)`` among its cuts.

    Taking the largest keeps the multipartite bound valid for unequal local
    dimensions; for equal dimensions every cut in a class agrees.
    """
    n = len(local_dims)
    total = math.prod(local_dims)
    best: dict[int, int] = {}
    for b in enumerate_bipartitions(n):
        ds = math.prod(local_dims[p] for p in b.parties)
        best[b.size] = max(best.get(b.size, 0), min(ds, total // ds))
    return [best[k] for k, _ in size_classes(n)]


# --- batched fast path ---------------------------------------------------------


@lru_cache(maxsize=64)
def _cut_plan(local_dims: tuple[int, ...]) -> list[tuple[tuple[int, ...], int, int]]:
    """Cuts grouped by matrix shape: ``(flat permutation of all groups, rows, cols)``."""
    n = len(local_dims)
    groups: dict[tuple[int, int], list[list[int]]] = {}
    for b in enumerate_bipartitions(n):
        rows = math.prod(local_dims[p] for p in b.parties)
        cols = math.prod(local_dims) // rows
        groups.setdefault((rows, cols), []).append(list(b.parties) + list(b.complement))
    return [(tuple(map(tuple, perms)), r, c) for (r, c), perms in groups.items()]


def cut_spectra_array(amplitudes: np.ndarray, local_dims: Sequence[int]) -> list[np.ndarray]:
    """Reduced spectra of every cut as arrays (one ``(cuts, min_dim)`` block per shape).

    Cut order inside blocks follows enumeration order; only the multiset of
    values matters to the aggregates that use this.
    """
    dims = tuple(int(d) for d in local_dims)
    t = np.asarray(amplitudes).reshape(dims)
    out = []
    for perms, r, c in _cut_plan(dims):
        mats = np.stack([np.transpose(t, p).reshape(r, c) for p in perms])
        s = np.linalg.svd(mats, compute_uv=False)
        lam = s * s
        lam[lam < ZERO_TOL] = 0.0
        out.append(np.minimum(lam, 1.0))
    return out


def galpha_c_value(amplitudes: np.ndarray, local_dims: Sequence[int], alpha: float) -> float:
    """Aggregate GαC of a normalized vector without building a report."""
    alpha = check_alpha(alpha)
    n = len(local_dims)
    if n < 3:
        raise NotMultipartiteError(f"genuine multipartite measures need >= 3 parties, got {n}")
    logs = []
    for lam in cut_spectra_array(amplitudes, local_dims):
        if alpha == 0.0:
            vals = np.count_nonzero(lam, axis=1) - 1.0
        else:
            vals = np.sum(np.where(lam > 0, lam, 0.0) ** alpha, axis=1) - 1.0
        if np.any(vals <= ZERO_TOL):
            return 0.0
        logs.append(np.log(vals))
    return math.exp(math.fsum(np.concatenate(logs)) / cardinality(n))
