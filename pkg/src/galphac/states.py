"""Constructors for the state families studied, plus Haar sampling and perturbation."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .core import PureState, pure_trace_distance
from .errors import InvalidArgumentError

THETA_MAX = math.pi / 2


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_n(n: int) -> int:
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"need n >= 2 qubits, got {n!r}")
    return int(n)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= THETA_MAX + 1e-12:
        raise InvalidArgumentError(f"theta must lie in [0, pi/2], got {theta}")
    return min(theta, THETA_MAX)


def basis_index(bits: str | Sequence[int], local_dims: Sequence[int] | None = None) -> int:
    """Flat index of ``|a1 a2 ... an>`` with party 0 most significant."""
    digits = [int(b) for b in bits]
    dims = local_dims or [2] * len(digits)
    idx = 0
    for a, d in zip(digits, dims):
        idx = idx * d + a
    return idx


def from_terms(terms: dict[str, complex], local_dims: Sequence[int] | None = None) -> PureState:
    """Build a state from ``{"010": amp, ...}`` (normalized afterwards)."""
    first = next(iter(terms))
    dims = tuple(local_dims or [2] * len(first))
    v = np.zeros(math.prod(dims), dtype=np.complex128)
    for bits, amp in terms.items():
        v[basis_index(bits, dims)] += amp
    return PureState.from_unnormalized(v, dims)


def ghz(n: int) -> PureState:
    n = _check_n(n)
    v = np.zeros(2**n, dtype=np.complex128)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return PureState(v, (2,) * n)


def w(n: int) -> PureState:
    n = _check_n(n)
    v = np.zeros(2**n, dtype=np.complex128)
    v[[1 << (n - 1 - k) for k in range(n)]] = 1 / math.sqrt(n)
    return PureState(v, (2,) * n)


def product(n: int, bits: str | None = None) -> PureState:
    """Computational basis state, ``|00...0>`` by default."""
    bits = bits or "0" * _check_n(n)
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[basis_index(bits)] = 1.0
    return PureState(v, (2,) * len(bits))


def type_a(theta: float) -> PureState:
    """``(cos t |000> + sin t |001>)/sqrt2 + |111>/sqrt2``."""
    t = _check_theta(theta)
    v = np.zeros(8, dtype=np.complex128)
    v[0b000] = math.cos(t) / math.sqrt(2)
    v[0b001] = math.sin(t) / math.sqrt(2)
    v[0b111] = 1 / math.sqrt(2)
    return PureState(v, (2, 2, 2))


def type_b(theta: float) -> PureState:
    """``cos t |000> + sin t |111>``."""
    t = _check_theta(theta)
    v = np.zeros(8, dtype=np.complex128)
    v[0b000] = math.cos(t)
    v[0b111] = math.sin(t)
    return PureState(v, (2, 2, 2))


def four_qubit_family(theta: float) -> PureState:
    """``sin t (cos(3pi/5)|0100> + sin(3pi/5)|1000>) + cos t |0011>``."""
    t = _check_theta(theta)
    a = 3 * math.pi / 5
    v = np.zeros(16, dtype=np.complex128)
    v[0b0100] = math.sin(t) * math.cos(a)
    v[0b1000] = math.sin(t) * math.sin(a)
    v[0b0011] = math.cos(t)
    return PureState(v, (2, 2, 2, 2))


def random_pure(local_dims: Sequence[int], seed=None) -> PureState:
    """Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized."""
    rng = _rng(seed)
    dims = tuple(int(d) for d in local_dims)
    D = math.prod(dims)
    v = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    return PureState.from_unnormalized(v, dims)


def random_local_unitaries(local_dims: Sequence[int], seed=None) -> list[np.ndarray]:
    rng = _rng(seed)
    return [unitary_group.rvs(int(d), random_state=rng) for d in local_dims]


def apply_local(state: PureState, unitaries: Sequence[np.ndarray]) -> PureState:
    """Apply ``U_1 ⊗ ... ⊗ U_n`` party by party."""
    t = state.tensor()
    for k, u in enumerate(unitaries):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return PureState.from_unnormalized(t.reshape(-1), state.local_dims)


def permute_parties(state: PureState, order: Sequence[int]) -> PureState:
    """Relabel parties: new party ``i`` is old party ``order[i]``."""
    t = np.transpose(state.tensor(), list(order))
    return PureState(t.reshape(-1), tuple(state.local_dims[p] for p in order))


def tensor_product(a: PureState, b: PureState) -> PureState:
    return PureState(np.kron(a.amplitudes, b.amplitudes), a.local_dims + b.local_dims)


def random_biseparable(local_dims: Sequence[int], seed=None) -> PureState:
    """Haar states on a random cut ``S|S̄``, tensored and reordered to the original labels."""
    rng = _rng(seed)
    n = len(local_dims)
    k = int(rng.integers(1, n))
    side = sorted(rng.choice(n, size=k, replace=False).tolist())
    rest = [p for p in range(n) if p not in side]
    left = random_pure([local_dims[p] for p in side], rng)
    right = random_pure([local_dims[p] for p in rest], rng)
    joint = tensor_product(left, right)
    # joint has parties in order side + rest; undo that ordering
    order = side + rest
    inverse = [order.index(p) for p in range(n)]
    return permute_parties(joint, inverse)


def perturb(state: PureState, epsilon: float, seed=None) -> PureState:
    """Nearby state whose projector is at trace distance at most ``epsilon``.

    Rotates towards a Haar-random direction orthogonal to ``state`` by the
    angle ``t`` with ``2 sin t = epsilon``; the distance is rechecked and the
    angle shrunk if rounding pushed it over.
    """
    if epsilon < 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon}")
    if epsilon == 0:
        return state
    rng = _rng(seed)
    psi = state.amplitudes
    D = psi.size
    if D < 2:
        return state
    phi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    phi = phi - np.vdot(psi, phi) * psi
    phi /= np.linalg.norm(phi)
    t = math.asin(min(epsilon / 2.0, 1.0))
    for _ in range(64):
        out = PureState.from_unnormalized(math.cos(t) * psi + math.sin(t) * phi, state.local_dims)
        if pure_trace_distance(state, out) <= epsilon:
            return out
        t *= 1 - 1e-6
    raise ArithmeticError(f"could not place a perturbation within epsilon={epsilon}")


THETA_FAMILIES = {"typeA": type_a, "typeB": type_b, "fam4": four_qubit_family}


def parse_dims(text: str) -> tuple[int, ...]:
    """``"2,2,2"`` or ``"2x2x2"`` to ``(2, 2, 2)``."""
    parts = text.replace("x", ",").split(",")
    try:
        return tuple(int(p) for p in parts if p.strip())
    except ValueError:
        raise InvalidArgumentError(f"cannot parse local dimensions {text!r}") from None


def from_family_id(spec: str) -> PureState:
    """Build a state from ``ghz:<n>``, ``w:<n>``, ``typeA:<theta>``, ``typeB:<theta>``,
    ``fam4:<theta>`` or ``random:<dims>:<seed>``."""
    name, _, arg = spec.partition(":")
    try:
        if name == "ghz":
            return ghz(int(arg))
        if name == "w":
            return w(int(arg))
        if name in THETA_FAMILIES:
            return THETA_FAMILIES[name](float(arg))
        if name == "random":
            dims, _, seed = arg.partition(":")
            return random_pure(parse_dims(dims), int(seed) if seed else 0)
    except ValueError as exc:
        raise InvalidArgumentError(f"bad family id {spec!r}: {exc}") from None
    raise InvalidArgumentError(f"unknown state family {spec!r}")
