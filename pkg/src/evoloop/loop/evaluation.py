"""Greedy evaluation on the eval split.

One temperature-0 trajectory per instruction; accuracy is the fraction
whose final answer passes the instruction's checker. Deterministic for
hermetic backends.
"""

from __future__ import annotations

from ..actor.backends import TabularPolicyBackend
from ..actor.sampling import SamplingConfig, sample_trajectories
from ..env.checking import check_answer
from ..errors import ValidationError
from ..trainer.policy import PolicyModel


def evaluate(model_or_backend, eval_instructions, registry, round_cap: int) -> float:
    """Accuracy of greedy rollouts over the eval instructions."""
    if not eval_instructions:
        raise ValidationError("eval split is empty")
    if isinstance(model_or_backend, PolicyModel):
        backend = TabularPolicyBackend(model_or_backend, temperature=0.0)
    else:
        backend = model_or_backend
    cfg = SamplingConfig(k=1, m=round_cap, temperature=0.0, seed=0)
    trajectories = sample_trajectories(eval_instructions, backend, cfg, registry)
    by_id = {instr.id: instr for instr in eval_instructions}
    passed = sum(
        1 for t in trajectories
        if t.final_answer is not None and check_answer(by_id[t.instruction_id], t.final_answer)
    )
    return passed / len(eval_instructions)
