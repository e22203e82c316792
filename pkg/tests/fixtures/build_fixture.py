"""Build the three-video fixture corpus used by the end-to-end tests.

    python tests/fixtures/build_fixture.py text    # rewrite committed text artifacts
    python tests/fixtures/build_fixture.py audio   # write audio.wav files (not committed)
    python tests/fixtures/build_fixture.py model   # retrain shout_model.bin

Every second of every video is an integer-aligned unit, so each expected
fraction below is an exact ratio of whole seconds.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
CORPUS = HERE / "corpus"
DURATION = 600

FOUL = "you are a liar and a fraud"

# (start, end, overlapped, foul) per utterance; speakers rotate spk_00..spk_02
VIDEOS = {
    "va": {
        "title": "Who won the vote",
        "published_at": "2020-01-05T18:00:00Z",
        "tags": ["babri masjid", "breaking news"],
        "utterances": [(i * 60, i * 60 + 60, i == 1, i in (4, 7)) for i in range(10)],
        "shout": [(100, 160)],
        "faces": [(0, "male", 0.95, 80, 90), (3, "male", 0.97, 80, 90), (6, "Man", 0.99, 100, 100),
                  (9, "Woman", 0.97, 60, 60), (12, "male", 0.50, 80, 90), (15, "F", 0.99, 30, 30)],
        "names": ["major general gd bakshi", "ravi kumar", "anil mehta", "meera das"],
        "ocr": [(0, "LIVE #CongInsultsDemocracy now"), (30, "#YogiWakeUp tonight"), (60, "#yogiwakeup")],
    },
    "vb": {
        "title": "Kashmir politics tonight",
        "published_at": "2020-01-20T18:00:00Z",
        "tags": ["kashmir", "politics"],
        "utterances": [(i * 30, i * 30 + 30, i in (3, 9, 15), i == 10) for i in range(20)],
        "shout": [(200, 230), (400, 445)],
        "faces": [(0, "female", 0.95, 80, 90), (3, "female", 0.95, 50, 50), (6, "male", 0.95, 70, 70)],
        "names": ["general bakshi", "g.d. bakshi", "ravi kumar", "sunil rao", "syed asad abbas"],
        "ocr": [(0, "no tags here")],
    },
    "vc": {
        "title": "The economy",
        "published_at": "2020-02-10T18:00:00Z",
        "tags": ["economy"],
        "utterances": [(i * 50, i * 50 + 50, False, False) for i in range(12)],
        "shout": [],
        "faces": [],
        "names": ["sayyed asad abbas", "Major General GD Bakshi", "anil mehta", "ravi kumar", "kiran shah"],
        "ocr": [],
    },
}

SENTENCES = [
    "modi won the vote today",
    "the cabinet met again",
    "rahul gave a speech",
    "congress will not apologize",
    "yogi spoke at the rally",
    "vadra and shah argued",
]

ROSTER = [
    ("gd bakshi", "activist", ""),
    ("ravi kumar", "spokesperson", "BJP"),
    ("anil mehta", "politician", "Congress"),
    ("meera das", "politician", "All India Trinamool Congress"),
    ("sunil rao", "politician", "BJP"),
    ("kiran shah", "spokesperson", "AAP"),
]

LEXICON = [("liar", "insult", "0.8"), ("fraud", "insult", "0.7"), ("idiot", "insult", "0.9")]

# hand-computed expectations
EXPECTED = {
    "va": {"overlap_fraction": 60 / 600, "toxic_utterance_fraction": 2 / 10, "shouting_fraction": 60 / 600,
           "male_face_seconds": 9.0, "female_face_seconds": 3.0, "shouters": 2},
    "vb": {"overlap_fraction": 90 / 600, "toxic_utterance_fraction": 1 / 20, "shouting_fraction": 75 / 600,
           "male_face_seconds": 3.0, "female_face_seconds": 6.0, "shouters": 3},
    "vc": {"overlap_fraction": 0 / 600, "toxic_utterance_fraction": 0 / 12, "shouting_fraction": 0 / 600,
           "male_face_seconds": 0.0, "female_face_seconds": 0.0, "shouters": 0},
}


def write_text(root: Path = CORPUS) -> None:
    for vid, video in VIDEOS.items():
        d = root / vid
        d.mkdir(parents=True, exist_ok=True)
        meta = {"id": vid, "title": video["title"], "description": "", "tags": video["tags"],
                "duration_s": DURATION, "published_at": video["published_at"]}
        (d / "metadata.json").write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
        lines, diar, overlap = [], [], []
        for i, (start, end, ov, foul) in enumerate(video["utterances"]):
            spk = f"spk_{i % 3:02d}"
            text = FOUL if foul else SENTENCES[i % len(SENTENCES)] + "."
            lines.append(json.dumps({"video_id": vid, "start_s": start, "end_s": end, "speaker": spk, "text": text}))
            diar.append(f"SPEAKER {vid} 1 {start} {end - start} <NA> <NA> {spk} <NA> <NA>")
            if ov:
                overlap.append(f"OVERLAP {vid} 1 {start} {end - start} <NA> <NA> overlap <NA> <NA>")
        (d / "transcript.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
        (d / "diarization.rttm").write_text(";; fixture diarization\n" + "\n".join(diar) + "\n", encoding="utf-8")
        if overlap:
            (d / "overlap.rttm").write_text("\n".join(overlap) + "\n", encoding="utf-8")
        faces = ["video_id,t_s,x,y,w,h,gender,confidence"]
        faces += [f"{vid},{t},10,10,{w},{h},{g},{c}" for t, g, c, w, h in video["faces"]]
        (d / "faces.csv").write_text("\n".join(faces) + "\n", encoding="utf-8")
        (d / "names.jsonl").write_text(json.dumps({"video_id": vid, "candidates": video["names"]}) + "\n",
                                       encoding="utf-8")
        ocr = [json.dumps({"video_id": vid, "t_s": t, "text": txt}) for t, txt in video["ocr"]]
        (d / "ocr.jsonl").write_text("".join(line + "\n" for line in ocr), encoding="utf-8")
    (HERE / "roster.csv").write_text(
        "canonical_name,occupation,affiliation\n" + "".join(f"{n},{o},{a}\n" for n, o, a in ROSTER), encoding="utf-8")
    (HERE / "lexicon.csv").write_text(
        "term,attribute,weight\n" + "".join(",".join(r) + "\n" for r in LEXICON), encoding="utf-8")


def shout_labels(vid: str) -> np.ndarray:
    labels = np.zeros(DURATION, dtype=int)
    for start, end in VIDEOS[vid]["shout"]:
        labels[start:end] = 1
    return labels


def write_audio(root: Path = CORPUS, seed: int = 1234) -> None:
    from tvdebate.audio import write_wav
    from tvdebate.audio.synth import synth_audio

    for k, vid in enumerate(sorted(VIDEOS)):
        rng = np.random.default_rng(seed + k)
        write_wav(root / vid / "audio.wav", synth_audio(shout_labels(vid), rng))


def train_model(out: Path = HERE / "shout_model.bin", seed: int = 0) -> float:
    from tvdebate.audio import accuracy, split_by_group, train_shout_model
    from tvdebate.audio.dataset import synthetic_training_set

    x, y, groups = synthetic_training_set(seed)
    train, test = split_by_group(groups, 0.2, seed)
    model = train_shout_model(x[train], y[train], seed=seed)
    acc = accuracy(model, x[test], y[test])
    model.metadata["held_out_accuracy"] = acc
    model.save(out)
    return acc


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("what", choices=["text", "audio", "model"])
    p.add_argument("--root", type=Path, default=CORPUS)
    args = p.parse_args(argv)
    if args.what == "text":
        write_text(args.root)
    elif args.what == "audio":
        write_audio(args.root)
    else:
        print(f"held-out accuracy {train_model():.4f}")


if __name__ == "__main__":
    main()
