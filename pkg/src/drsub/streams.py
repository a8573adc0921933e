"""Function streams under the adversarial, random-order and i.i.d. models."""

from typing import Annotated, Literal, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr

from .errors import InvalidParameterError
from .functions import FamilySpec, NoiseCoupling, NoisyGradientOracle, ObjectiveFunction, QuadraticUtility

T = TypeVar("T")


def permute(items: Sequence[T], seed: int) -> list[T]:
    """Uniformly random reordering drawn from ``seed``.

    numpy's permutation is a Fisher-Yates shuffle, so every ordering is
    equally likely and the multiset is preserved.
    """
    if len(items) == 0:
        raise InvalidParameterError("cannot permute an empty sequence")
    order = np.random.default_rng(seed).permutation(len(items))
    return [items[i] for i in order]


class AdversarialStream(BaseModel):
    """A fixed list of functions played in the given order."""

    model: Literal["adversarial"] = "adversarial"
    functions: list[FamilySpec]

    @property
    def horizon(self) -> int:
        return len(self.functions)

    def sequence(self) -> list[ObjectiveFunction]:
        return [spec.build() for spec in self.functions]


class RandomOrderStream(BaseModel):
    """A fixed multiset of functions arriving in a seeded random order."""

    model: Literal["random_order"] = "random_order"
    functions: list[FamilySpec]
    seed: int = 0

    @property
    def horizon(self) -> int:
        return len(self.functions)

    def sequence(self) -> list[ObjectiveFunction]:
        return permute([spec.build() for spec in self.functions], self.seed)


class IidStream(BaseModel):
    """f_t drawn i.i.d. around a quadratic mean through a noisy oracle.

    The oracle is created on first use and kept, so iid_draw can hand out
    the same realization again for re-querying.
    """

    model: Literal["iid"] = "iid"
    matrix: list[list[float]]
    linear: list[float] | None = None
    noise_scale: float = Field(ge=0)
    coupling: NoiseCoupling = NoiseCoupling.HESSIAN
    horizon: int = Field(ge=1)
    seed: int = 0
    retain: bool = False
    _oracle: NoisyGradientOracle | None = PrivateAttr(default=None)

    @property
    def oracle(self) -> NoisyGradientOracle:
        if self._oracle is None:
            self._oracle = NoisyGradientOracle(
                self.matrix,
                self.linear,
                noise_scale=self.noise_scale,
                coupling=self.coupling,
                seed=self.seed,
                retain=self.retain,
            )
        return self._oracle

    @property
    def expected(self) -> QuadraticUtility:
        return self.oracle.expected


StreamModel = Annotated[AdversarialStream | RandomOrderStream | IidStream, Field(discriminator="model")]


def iid_draw(stream: IidStream, t: int) -> QuadraticUtility:
    """Materialize f_t of an i.i.d. stream (1 <= t <= horizon)."""
    if not 1 <= t <= stream.horizon:
        raise InvalidParameterError(f"round must lie in [1, {stream.horizon}]", t=t)
    return stream.oracle.realize(t)
