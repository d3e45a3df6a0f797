"""Property testers for ReLU networks viewed as weighted devices on bit inputs."""

from .network import (
    DeepNetwork, MoNetwork, ShlNetwork, WeightOracle, deserialize, eval_deep, eval_mo, eval_shl,
    restrict_output, serialize,
)
from .sampling import (
    EnumerationTooLarge, SamplePlan, TesterConfig, draw_plan_deep, draw_plan_shl, find_witness,
    paper_sizes_deep, paper_sizes_shl, scaled_value_deep, scaled_value_shl,
)
from .testers import (
    Verdict, all_zero_tester, one_sided_or_tester, one_sided_zero_tester, or_tester, vanilla_tester,
)
from .deep import NearConstantTarget, all_zero_tester_mhl, near_constant_tester, or_tester_mhl
from .monotone import GeneratorFn, full_monotone_property_tester, monotone_property_tester

__version__ = "0.1.0"

__all__ = [
    "ShlNetwork", "MoNetwork", "DeepNetwork", "WeightOracle", "eval_shl", "eval_mo", "eval_deep",
    "restrict_output", "serialize", "deserialize", "TesterConfig", "SamplePlan", "EnumerationTooLarge",
    "draw_plan_shl", "draw_plan_deep", "paper_sizes_shl", "paper_sizes_deep", "scaled_value_shl",
    "scaled_value_deep", "find_witness", "Verdict", "all_zero_tester", "or_tester",
    "one_sided_zero_tester", "one_sided_or_tester", "vanilla_tester", "NearConstantTarget",
    "all_zero_tester_mhl", "or_tester_mhl", "near_constant_tester", "GeneratorFn",
    "monotone_property_tester", "full_monotone_property_tester",
]
