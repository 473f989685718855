"""Born-rule joint distributions for two-qubit pure states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import (
    SINGLE,
    CorrelatorSummary,
    JointDistribution,
    Kind,
    LeggettError,
    SettingPair,
    make_rng,
    validate_distribution,
)

NORM_TOL = 1e-12


class ZeroVector(LeggettError):
    pass


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Unit-norm amplitudes over the reference basis ordered ++, +-, -+, --."""

    amplitudes: np.ndarray
    kind: Kind = Kind.PHOTON

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(4)
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise LeggettError(f"state norm^2 = {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "kind", Kind(self.kind))

    def __eq__(self, other):
        if not isinstance(other, TwoQubitState):
            return NotImplemented
        return self.kind is other.kind and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


def analyzer_basis(theta: float, kind: Kind = Kind.PHOTON) -> tuple[np.ndarray, np.ndarray]:
    """The (+, -) measurement vectors for an analyzer at angle ``theta``.

    Photons use the physical angle, spins the half angle, so that a rotation
    by pi (photon) or 2*pi (spin) maps the basis onto itself up to sign.
    """
    phi = Kind(kind).factor * theta / 2
    c, s = math.cos(phi), math.sin(phi)
    return np.array([c, s]), np.array([-s, c])


def _normalized(amps, kind) -> TwoQubitState:
    amps = np.asarray(amps, dtype=complex).reshape(4)
    norm = np.linalg.norm(amps)
    if norm == 0.0 or not np.isfinite(norm):
        raise ZeroVector("amplitudes must be finite and not all zero")
    return TwoQubitState(amps / norm, kind)


def state_from_spec(spec: Union[str, tuple, Sequence[complex]], kind: Kind = Kind.PHOTON) -> TwoQubitState:
    """Build a state from ``"singlet"``, ``"phi_plus"``, ``("product", t1, t2)`` or four raw amplitudes.

    Raw amplitudes are normalized; an all-zero vector raises :class:`ZeroVector`.
    """
    kind = Kind(kind)
    r = 1 / math.sqrt(2)
    if isinstance(spec, str):
        if spec == "singlet":
            return TwoQubitState(np.array([0, r, -r, 0], dtype=complex), kind)
        if spec == "phi_plus":
            return TwoQubitState(np.array([r, 0, 0, r], dtype=complex), kind)
        raise LeggettError(f"unknown named state {spec!r}")
    if len(spec) == 3 and spec[0] == "product":
        plus1, _ = analyzer_basis(float(spec[1]), kind)
        plus2, _ = analyzer_basis(float(spec[2]), kind)
        return _normalized(np.kron(plus1, plus2), kind)
    if len(spec) != 4:
        raise LeggettError(f"expected 4 amplitudes, got {len(spec)}")
    return _normalized(spec, kind)


def born_joint(state: TwoQubitState, pair: SettingPair) -> JointDistribution:
    """Outcome probabilities for ideal projective measurements at ``pair``."""
    psi = state.amplitudes.reshape(2, 2)
    basis_a = analyzer_basis(pair.a, state.kind)
    basis_b = analyzer_basis(pair.b, state.kind)
    probs = [abs(va @ psi @ vb) ** 2 for va in basis_a for vb in basis_b]
    return validate_distribution(probs, settings=pair)


def singlet_closed_form(pair: SettingPair, kind: Kind = Kind.PHOTON) -> CorrelatorSummary:
    return CorrelatorSummary(0.0, 0.0, -math.cos(Kind(kind).factor * (pair.a - pair.b)), SINGLE)


def random_pure_state(seed: int, kind: Kind = Kind.PHOTON) -> TwoQubitState:
    """Haar-random state from 8 standard normals (real and imaginary parts)."""
    rng = make_rng(seed)
    while True:
        x = rng.standard_normal(8)
        amps = x[:4] + 1j * x[4:]
        if np.any(amps):
            return _normalized(amps, kind)
