import pytest

from cinemeta import demo, pipeline


@pytest.fixture(scope="session")
def demo_project(tmp_path_factory):
    """The generated demo project, ingested once and shared read-only."""

    root = tmp_path_factory.mktemp("demo")
    paths = demo.write_demo_project(root)
    config = pipeline.load_config(paths["config"])
    summary = pipeline.run_ingest(config)
    return {
        "root": root,
        "config_path": paths["config"],
        "config": config,
        "truth": paths["truth"],
        "clip_ids": paths["clips"],
        "catalog": summary["catalog"],
        "export": summary["export"],
        "log": summary["log"],
    }
