"""
Analyzing the three-video fixture corpus
========================================

Copies the committed fixture into a scratch directory, synthesizes its
audio, then runs ``analyze`` and ``report`` through the CLI entry point.
Run from the repository root: ``python demos/fixture_walkthrough.py``.
"""

# %%
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import make_corpus  # noqa: E402

from tvdebate.cli import main  # noqa: E402

work = make_corpus(Path(tempfile.mkdtemp(prefix="tvdebate-demo-")))
print("scratch corpus:", work)

# %% per-video analysis; completed videos are skipped on a rerun
main(["analyze", "--config", str(work / "run.json")])
main(["analyze", "--config", str(work / "run.json")])

# %%
rec = json.loads((work / "out/store/videos/va.json").read_text())
for key in ("major_category", "overlap_fraction", "toxic_utterance_fraction", "shouting_fraction",
            "shouting_segments", "male_face_seconds", "female_face_seconds", "shouters", "hashtags"):
    print(f"{key:26s} {rec[key]}")

# %% corpus tables
main(["report", "--store", str(work / "out/store"), "--out", str(work / "out/report")])
for name in ("videos.csv", "appearance_bias.csv", "triads.csv", "gender_monthly.csv"):
    print(f"--- {name}")
    print((work / "out/report" / name).read_text())
