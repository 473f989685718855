"""Malus-law hidden-variable subensembles and mixed-source correlator triples.

A :class:`MalusProductModel` gives each particle a definite polarization and
lets it pass an analyzer with the Malus probability.  :func:`mixed_triple`
combines marginals from one distribution with the correlator of another,
which is the only way the basic Leggett bounds can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    MIXED,
    CorrelatorSummary,
    JointDistribution,
    Kind,
    LeggettError,
    SettingPair,
    summarize,
    validate_distribution,
)
from .quantum import TwoQubitState, born_joint


class SettingMismatch(LeggettError):
    pass


@dataclass(frozen=True)
class MalusProductModel:
    u: float
    v: float
    kind: Kind = Kind.PHOTON

    def __post_init__(self):
        for name in ("u", "v"):
            if not math.isfinite(getattr(self, name)):
                raise LeggettError(f"{name} is not finite")
        object.__setattr__(self, "kind", Kind(self.kind))


def malus_probability(u: float, a: float, kind: Kind = Kind.PHOTON) -> float:
    """Probability of outcome +1 for polarization ``u`` at analyzer angle ``a``."""
    return math.cos(Kind(kind).factor * (a - u) / 2) ** 2


def malus_marginal(u: float, a: float, kind: Kind = Kind.PHOTON) -> float:
    return math.cos(Kind(kind).factor * (a - u))


def malus_product_joint(model: MalusProductModel, pair: SettingPair) -> JointDistribution:
    p = malus_probability(model.u, pair.a, model.kind)
    q = malus_probability(model.v, pair.b, model.kind)
    return validate_distribution(
        [p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q)], settings=pair
    )


Model = Union[MalusProductModel, TwoQubitState, JointDistribution]


def joint_of(model: Model, pair: Optional[SettingPair]) -> JointDistribution:
    if pair is None and not isinstance(model, JointDistribution):
        raise LeggettError("a setting pair is required for generated distributions")
    if isinstance(model, MalusProductModel):
        return malus_product_joint(model, pair)
    if isinstance(model, TwoQubitState):
        return born_joint(model, pair)
    if isinstance(model, JointDistribution):
        if None not in (model.settings, pair) and model.settings != pair:
            raise SettingMismatch(f"distribution tagged {model.settings}, requested {pair}")
        return model
    raise TypeError(f"unsupported source model {type(model).__name__}")


def describe(model: Model, pair: Optional[SettingPair]) -> dict:
    settings = None if pair is None else {"a": pair.a, "b": pair.b}
    if isinstance(model, MalusProductModel):
        return {"model": "malus-product", "u": model.u, "v": model.v,
                "kind": model.kind.value, "settings": settings}
    if isinstance(model, TwoQubitState):
        return {"model": "born-rule", "kind": model.kind.value,
                "amplitudes": [[z.real, z.imag] for z in model.amplitudes.tolist()],
                "settings": settings}
    return {"model": "explicit", "probabilities": [str(p) for p in model.probabilities()],
            "settings": settings}


@dataclass(frozen=True)
class MixedSummary:
    summary: CorrelatorSummary
    marginal_source: dict
    correlation_source: dict


def mixed_triple(
    marginal_src: tuple[Model, SettingPair],
    correlation_src: tuple[Model, SettingPair],
) -> MixedSummary:
    """Marginal averages from ``marginal_src``, correlator from ``correlation_src``.

    Each source is a ``(model, settings)`` pair; both must use the same
    settings.  An explicit :class:`JointDistribution` may come with
    ``settings=None``.  The result is tagged as mixed and may violate the bounds.
    """
    (m_model, m_pair), (c_model, c_pair) = marginal_src, correlation_src
    if m_pair != c_pair:
        raise SettingMismatch(f"marginal source at {m_pair}, correlation source at {c_pair}")
    marginals = summarize(joint_of(m_model, m_pair))
    correlation = summarize(joint_of(c_model, c_pair))
    summary = CorrelatorSummary(marginals.mean_a, marginals.mean_b, correlation.corr, MIXED)
    return MixedSummary(summary, describe(m_model, m_pair), describe(c_model, c_pair))
