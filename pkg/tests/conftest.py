import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from leadframe.config import load_run_config
from leadframe.panel import PanelSchema, build_timelines, parse_panel_csv
from leadframe.transform import AggregationPlan, FeatureSpec

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
PANEL_CSV = DATA_DIR / "telecom_panel.csv"
CONFIG_JSON = DATA_DIR / "telecom_config.json"


@pytest.fixture(scope="session")
def run_config():
    return load_run_config(CONFIG_JSON)


@pytest.fixture(scope="session")
def schema(run_config) -> PanelSchema:
    return run_config.schema


@pytest.fixture(scope="session")
def plan(run_config) -> AggregationPlan:
    return run_config.plan


@pytest.fixture(scope="session")
def fixture_dataset(schema):
    return parse_panel_csv(PANEL_CSV.read_bytes(), schema)


@pytest.fixture(scope="session")
def fixture_timelines(fixture_dataset):
    return build_timelines(fixture_dataset)


@pytest.fixture(scope="session")
def timeline_of(fixture_timelines):
    by_id = {t.entity_id: t for t in fixture_timelines}
    return by_id.__getitem__


@pytest.fixture(scope="session")
def corpus_schema() -> PanelSchema:
    return PanelSchema(
        entity_column="entity",
        period_column="period",
        event_column="event",
        feature_columns=("a", "b", "c"),
    )


@pytest.fixture(scope="session")
def corpus_plan() -> AggregationPlan:
    return AggregationPlan(
        (
            FeatureSpec.sum("sum_a", "a"),
            FeatureSpec.count_nonzero("nonzero_b", "b"),
            FeatureSpec.max("max_c", "c"),
            FeatureSpec.last("last_a", "a"),
            FeatureSpec.ratio_of_sums("ratio_ab", "a", "b"),
        )
    )
