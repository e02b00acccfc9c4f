import pathlib

import pytest

from orcha.config import RenderConfig
from orcha.model import ChartSpec, parse_labels, parse_links, parse_streams

DATA = pathlib.Path(__file__).parent / "data"
FIG2A = DATA / "fig2a"


def read(path: pathlib.Path) -> str:
    return path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fig2a_csvs() -> tuple[str, str, str]:
    return (
        read(FIG2A / "streams.csv"),
        read(FIG2A / "links.csv"),
        read(FIG2A / "labels.csv"),
    )


@pytest.fixture()
def fig2a_spec(fig2a_csvs) -> ChartSpec:
    streams, links, labels = fig2a_csvs
    return ChartSpec(
        streams=parse_streams(streams),
        links=parse_links(links),
        labels=parse_labels(labels),
    )


@pytest.fixture()
def config() -> RenderConfig:
    return RenderConfig()
