"""Blocked Algorithm 1 for random-order (and adversarial trade-off) runs."""

from typing import Sequence
import math

from ..domain import PolytopeDomain
from ..errors import InvalidParameterError
from ..functions import ObjectiveFunction, average_functions, sum_functions
from ..offline import OfflineResult, best_comparator
from ..streams import permute
from ..trace import ALPHA_OFFLINE, RegretTrace, TraceMetadata
from .frank_wolfe import Alg1State, alg1_round, default_alg1_k


def blocked_run(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    W: int,
    mu: float,
    K: int | None = None,
    comparator: OfflineResult | None = None,
    algorithm: str = "alg1_blocked",
    seed: int | None = None,
) -> RegretTrace:
    """Run Algorithm 1 on block averages and replay each block's point.

    The sequence is cut into ⌈T/W⌉ consecutive blocks (the last one may be
    shorter). Block τ is summarized by its average function, Algorithm 1
    plays z_τ on it, and every round inside the block plays z_τ.

    Args:
        functions: The sequence, in arrival order
        domain: Feasible set
        W: Block size, 1 <= W <= T
        mu: Strong DR-submodularity modulus of the block averages
        K: Inner steps, default ⌈B/ln B⌉ for B blocks
        comparator: Precomputed comparator for the whole multiset

    Returns:
        Trace of utilities f_t(z_τ) per original round
    """
    T = len(functions)
    if not 1 <= W <= T:
        raise InvalidParameterError(f"block size W must lie in [1, {T}]", W=W, T=T)
    blocks = [functions[start : start + W] for start in range(0, T, W)]
    K = default_alg1_k(len(blocks)) if K is None else K
    if comparator is None:
        comparator = best_comparator(sum_functions(functions), domain)

    state = Alg1State.fresh(K, domain.dim, mu)
    plays, utilities = [], []
    for block in blocks:
        z, state = alg1_round(state, domain, average_functions(block))
        for f_t in block:
            plays.append(z)
            utilities.append(f_t.value(z))

    x_star = comparator.point
    metadata = TraceMetadata(
        algorithm=algorithm,
        alpha=ALPHA_OFFLINE,
        seed=seed,
        comparator=comparator.x_out,
        comparator_value=comparator.value,
        certificate=comparator.certificate,
        gradient_calls=K * len(blocks),
        params={"K": K, "mu": mu, "W": W, "blocks": math.ceil(T / W)},
    )
    return RegretTrace.build(plays, utilities, [f.value(x_star) for f in functions], metadata)


def blocked_random_order_run(
    functions: Sequence[ObjectiveFunction],
    domain: PolytopeDomain,
    W: int,
    mu: float,
    K: int | None = None,
    seed: int | None = None,
    comparator: OfflineResult | None = None,
) -> RegretTrace:
    """Blocked run on a uniformly random arrival order.

    With a seed the sequence is permuted first; without one it is taken as
    already permuted.
    """
    ordered = permute(functions, seed) if seed is not None else list(functions)
    return blocked_run(ordered, domain, W, mu, K, comparator, algorithm="alg1_random_order", seed=seed)
