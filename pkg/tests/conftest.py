import shutil
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def desk(tmp_path):
    """Copy of the 5-book desk corpus, toy lexicon and a config writing into tmp_path."""
    shutil.copytree(DATA / "desk_corpus", tmp_path / "corpus")
    shutil.copy(DATA / "toy_lexicon.tsv", tmp_path / "lexicon.tsv")
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[run]\n"
        "corpus = corpus\n"
        "lexicon = lexicon.tsv\n"
        "output = out\n"
        "svg_emotions = joy, fear\n"
        "seed = 0\n",
        encoding="utf-8",
    )
    return tmp_path


_VERDICTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    number, title = marker.args
    ok = rep.passed and _VERDICTS.get(number, (True,))[0]
    _VERDICTS[number] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        ok, title = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}")
