"""Run configuration: one JSON document driving every command.

Sections: ``schema`` (column roles), ``plan`` (aggregation features),
``reference_frame`` (lead time + empty-window policy), ``train`` (optimizer
settings), ``eval`` (split fraction, threshold, sweep lead times, seed).
``schema`` and ``plan`` are required; the rest fall back to defaults.
Command-line flags override individual fields after loading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import InvalidConfig
from .model import TrainConfig
from .panel import PanelSchema
from .transform import (
    AggKind,
    AggregationPlan,
    EmptyWindowPolicy,
    FeatureSpec,
    ReferenceFrameConfig,
)


@dataclass(frozen=True)
class EvalSettings:
    test_fraction: float = 0.25
    threshold: float = 0.5
    lead_times: tuple[int, ...] = (0, 1, 2, 3)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "lead_times", tuple(self.lead_times))
        if not 0.0 < self.test_fraction < 1.0:
            raise InvalidConfig("eval.test_fraction must lie strictly between 0 and 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise InvalidConfig("eval.threshold must lie in [0, 1]")
        if not self.lead_times or any(
            not isinstance(t, int) or t < 0 for t in self.lead_times
        ):
            raise InvalidConfig("eval.lead_times must be non-negative integers")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidConfig("eval.seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class RunConfig:
    schema: PanelSchema
    plan: AggregationPlan
    reference_frame: ReferenceFrameConfig = field(default_factory=ReferenceFrameConfig)
    train: TrainConfig = field(
        default_factory=lambda: TrainConfig(epochs=500, learning_rate=0.1)
    )
    eval_settings: EvalSettings = field(default_factory=EvalSettings)

    def __post_init__(self) -> None:
        unknown = self.plan.referenced_columns() - set(self.schema.feature_columns)
        if unknown:
            raise InvalidConfig(
                "plan references columns missing from the schema: "
                + ", ".join(sorted(unknown))
            )

    def to_json_dict(self) -> dict:
        return {
            "schema": {
                "entity_column": self.schema.entity_column,
                "period_column": self.schema.period_column,
                "event_column": self.schema.event_column,
                "feature_columns": list(self.schema.feature_columns),
            },
            "plan": [_spec_to_json(s) for s in self.plan.specs],
            "reference_frame": {
                "lead_time": self.reference_frame.lead_time,
                "empty_window_policy": self.reference_frame.empty_window_policy.value,
            },
            "train": self.train.to_json_dict(),
            "eval": {
                "test_fraction": self.eval_settings.test_fraction,
                "threshold": self.eval_settings.threshold,
                "lead_times": list(self.eval_settings.lead_times),
                "seed": self.eval_settings.seed,
            },
        }


def _spec_to_json(spec: FeatureSpec) -> dict:
    if spec.kind is AggKind.RATIO_OF_SUMS:
        return {
            "name": spec.output_name,
            "kind": spec.kind.value,
            "numerator": spec.column,
            "denominator": spec.denominator,
        }
    return {"name": spec.output_name, "kind": spec.kind.value, "column": spec.column}


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise InvalidConfig(f"{where} is missing required key {key!r}")
    return section[key]


def _spec_from_json(obj: dict, position: int) -> FeatureSpec:
    where = f"plan[{position}]"
    if not isinstance(obj, dict):
        raise InvalidConfig(f"{where} must be an object")
    name = _require(obj, "name", where)
    kind_value = _require(obj, "kind", where)
    try:
        kind = AggKind(kind_value)
    except ValueError:
        valid = ", ".join(k.value for k in AggKind)
        raise InvalidConfig(f"{where}: unknown kind {kind_value!r} (expected {valid})") from None
    if kind is AggKind.RATIO_OF_SUMS:
        return FeatureSpec.ratio_of_sums(
            name, _require(obj, "numerator", where), _require(obj, "denominator", where)
        )
    return FeatureSpec(name, kind, _require(obj, "column", where))


def run_config_from_json_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise InvalidConfig("config document must be a JSON object")

    schema_doc = _require(doc, "schema", "config")
    schema = PanelSchema(
        entity_column=_require(schema_doc, "entity_column", "schema"),
        period_column=_require(schema_doc, "period_column", "schema"),
        event_column=_require(schema_doc, "event_column", "schema"),
        feature_columns=tuple(_require(schema_doc, "feature_columns", "schema")),
    )

    plan_doc = _require(doc, "plan", "config")
    if not isinstance(plan_doc, list):
        raise InvalidConfig("plan must be a list of feature objects")
    plan = AggregationPlan(
        specs=tuple(_spec_from_json(obj, i) for i, obj in enumerate(plan_doc))
    )

    frame_doc = doc.get("reference_frame", {})
    policy_value = frame_doc.get("empty_window_policy", EmptyWindowPolicy.DROP.value)
    try:
        policy = EmptyWindowPolicy(policy_value)
    except ValueError:
        raise InvalidConfig(
            f"reference_frame.empty_window_policy must be 'drop' or 'zeros', "
            f"got {policy_value!r}"
        ) from None
    reference_frame = ReferenceFrameConfig(
        lead_time=frame_doc.get("lead_time", 1), empty_window_policy=policy
    )

    train_doc = doc.get("train", {})
    train = TrainConfig(
        epochs=train_doc.get("epochs", 500),
        learning_rate=train_doc.get("learning_rate", 0.1),
        l2_penalty=train_doc.get("l2_penalty", 0.0),
        seed=train_doc.get("seed", 0),
    )

    eval_doc = doc.get("eval", {})
    eval_settings = EvalSettings(
        test_fraction=eval_doc.get("test_fraction", 0.25),
        threshold=eval_doc.get("threshold", 0.5),
        lead_times=tuple(eval_doc.get("lead_times", (0, 1, 2, 3))),
        seed=eval_doc.get("seed", 0),
    )

    return RunConfig(
        schema=schema,
        plan=plan,
        reference_frame=reference_frame,
        train=train,
        eval_settings=eval_settings,
    )


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Load and validate a run config; see the module docstring for layout."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return run_config_from_json_dict(doc)
