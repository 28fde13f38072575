"""JSON state files.

Pure state::

    {"local_dims": [2, 2, 2], "amplitudes": [[re, im], ...]}

Density matrix::

    {"local_dims": [2, 2, 2], "entries": [[[re, im], ...], ...]}   # row-major

Amplitude order follows the party-0-most-significant convention of
:mod:`galphac.core`.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import DensityMatrix, PureState
from .errors import InvalidArgumentError, InvalidStateError


def _complex_array(raw, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InvalidStateError(f"{what} must be nested [re, im] number pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InvalidStateError(f"{what} must be nested [re, im] number pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _pairs(arr: np.ndarray) -> list:
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def state_to_dict(state: PureState) -> dict:
    return {"local_dims": list(state.local_dims), "amplitudes": _pairs(state.amplitudes)}


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"local_dims": list(rho.local_dims), "entries": _pairs(rho.entries)}


def _load_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidArgumentError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict) or "local_dims" not in data:
        raise InvalidStateError(f"{path}: expected an object with 'local_dims'")
    return data


def state_from_dict(data: dict) -> PureState:
    if "amplitudes" not in data:
        raise InvalidStateError("state file lacks 'amplitudes'")
    return PureState(_complex_array(data["amplitudes"], "amplitudes"), data["local_dims"])


def density_from_dict(data: dict) -> DensityMatrix:
    if "entries" not in data:
        raise InvalidStateError("density file lacks 'entries'")
    return DensityMatrix(_complex_array(data["entries"], "entries"), data["local_dims"])


def load_state(path) -> PureState:
    return state_from_dict(_load_json(path))


def load_density(path) -> DensityMatrix:
    """Density matrix from a file; a pure-state file is read as its projector."""
    data = _load_json(path)
    if "entries" not in data and "amplitudes" in data:
        return state_from_dict(data).projector()
    return density_from_dict(data)


def save_state(state: PureState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)))


def save_density(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(density_to_dict(rho)))
