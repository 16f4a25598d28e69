"""
Named analysis pipelines for simulation trials.
"""

from dataclasses import dataclass
from typing import Literal

from ..core.errors import ContractError

MatcherKind = Literal["pairs", "replacement", "none"]


@dataclass(frozen=True)
class Pipeline:
    """What one trial runs after sampling.

    Attributes:
        matcher: optimal pairs, nearest control with replacement, or the
            unmatched full sample
        randomization: statistics tested by within-pair randomization
        hc: run the baseline, saturated and selected HC regressions
        balance: run the Hotelling balance check on the analysed units
    """

    name: str
    matcher: MatcherKind
    randomization: tuple[str, ...] = ()
    hc: bool = False
    balance: bool = True
    description: str = ""

    def __post_init__(self):
        if self.randomization and self.matcher != "pairs":
            raise ContractError(
                f"pipeline '{self.name}': randomization tests need a pair matching"
            )


_PIPELINES: dict[str, Pipeline] = {}


def register_pipeline(pipeline: Pipeline) -> None:
    _PIPELINES[pipeline.name] = pipeline


def get_pipeline(name: str) -> Pipeline:
    try:
        return _PIPELINES[name]
    except KeyError:
        raise ContractError(
            f"unknown pipeline '{name}'; available: {', '.join(available_pipelines())}"
        ) from None


def available_pipelines() -> list[str]:
    return sorted(_PIPELINES)


for _pipeline in (
    Pipeline("pairs-dm", "pairs", ("dm",), description="pair matching, DM randomization test"),
    Pipeline("pairs-reg", "pairs", ("reg",), description="pair matching, REG randomization test"),
    Pipeline("pairs-rand", "pairs", ("dm", "reg"), description="pair matching, DM and REG tests"),
    Pipeline("pairs-hc", "pairs", hc=True, description="pair matching, HC regression tests"),
    Pipeline("pairs-all", "pairs", ("dm", "reg"), hc=True, description="every pair analysis"),
    Pipeline("replacement-hc", "replacement", hc=True,
             description="matching with replacement, weighted HC regression tests"),
    Pipeline("unmatched-hc", "none", hc=True, balance=False,
             description="full-sample HC regression tests without matching"),
):
    register_pipeline(_pipeline)
