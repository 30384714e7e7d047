#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture under tests/data/synthetic."""

import argparse
import json
import pathlib
import random

LABELS = [
    "Loaded_Language",
    "Name_Calling/Labeling",
    "Slogans",
    "Doubt",
    "Exaggeration/Minimisation",
    "Appeal_to_fear/prejudice",
    "no_technique",
]

CUES = {
    "Loaded_Language": ["كارثة", "مجزرة", "فضيحة"],
    "Name_Calling/Labeling": ["الخونة", "العملاء", "المرتزقة"],
    "Slogans": ["تحيا_الأمة", "معا_للنصر", "لا_للظلم"],
    "Doubt": ["هل_حقا", "يزعمون", "مشكوك"],
    "Exaggeration/Minimisation": ["أعظم", "أبدا", "مجرد"],
    "Appeal_to_fear/prejudice": ["احذروا", "الخطر", "الدمار"],
    "no_technique": ["اليوم", "الطقس", "المباراة"],
}

# Skewed on purpose so oversampling has work to do.
RATES = {
    "Loaded_Language": 0.45,
    "Name_Calling/Labeling": 0.35,
    "Slogans": 0.25,
    "Doubt": 0.15,
    "Exaggeration/Minimisation": 0.07,
    "Appeal_to_fear/prejudice": 0.04,
}

FILLER = ["في", "من", "على", "هذا", "الناس", "الحكومة", "الخبر", "قال", "news", "today"]
EMOJI = ["😀", "🔥", "😡", "👏", "🇸🇦", "💔"]
URLS = ["https://t.co/x1Yz", "http://example.com/a?b=1", "www.news.example/item"]
MENTIONS = ["@user_1", "@أحمد", "@news24"]


def label_set(rng):
    if rng.random() < 0.2:
        return ["no_technique"]
    picked = [l for l in LABELS[:-1] if rng.random() < RATES[l]]
    return picked or [rng.choice(LABELS[:-1])]


def make_text(rng, labels):
    words = []
    for label in labels:
        if rng.random() < 0.85:
            cue = rng.choice(CUES[label])
            if "_" in cue and rng.random() < 0.7:
                cue = "#" + cue
            words.append(cue)
    for label in LABELS:
        if label not in labels and rng.random() < 0.06:
            words.append(rng.choice(CUES[label]))
    words += rng.sample(FILLER, rng.randint(2, 5))
    if rng.random() < 0.5:
        words.append(rng.choice(EMOJI))
    if rng.random() < 0.3:
        words.append(rng.choice(URLS))
    if rng.random() < 0.3:
        words.insert(0, rng.choice(MENTIONS))
    rng.shuffle(words)
    return " ".join(words)


def write_split(path, prefix, n, rng):
    with open(path, "w", encoding="utf-8") as out:
        for i in range(n):
            labels = label_set(rng)
            row = {"id": f"{prefix}{i:04d}", "text": make_text(rng, labels), "labels": labels}
            out.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("tests/data/synthetic"))
    parser.add_argument("--seed", type=int, default=2022)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    (args.out / "labels.txt").write_text("\n".join(LABELS) + "\n", encoding="utf-8")
    write_split(args.out / "train.jsonl", "tr", 300, rng)
    write_split(args.out / "valid.jsonl", "va", 60, rng)
    write_split(args.out / "test.jsonl", "te", 100, rng)


if __name__ == "__main__":
    main()
