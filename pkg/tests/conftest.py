import json
import shutil
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"
sys.path.insert(0, str(FIXTURES))

import build_fixture  # noqa: E402


def make_corpus(root: Path) -> Path:
    """Copy the committed fixture into ``root``, synthesize audio and write run.json."""
    shutil.copytree(FIXTURES / "corpus", root / "corpus", ignore=shutil.ignore_patterns("audio.wav"))
    for name in ("roster.csv", "lexicon.csv", "shout_model.bin"):
        shutil.copy(FIXTURES / name, root / name)
    build_fixture.write_audio(root / "corpus")
    doc = json.loads((FIXTURES / "run.json").read_text())
    doc["output_dir"] = "out/store"
    (root / "run.json").write_text(json.dumps(doc, indent=1))
    return root


@pytest.fixture(scope="session")
def corpus_template(tmp_path_factory):
    return make_corpus(tmp_path_factory.mktemp("fixture"))


@pytest.fixture
def corpus(corpus_template, tmp_path):
    """A private, writable copy of the fixture corpus."""
    dest = tmp_path / "work"
    shutil.copytree(corpus_template, dest)
    return dest


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record one acceptance criterion and fail the test when it does not hold."""
    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
