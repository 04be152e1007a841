# SPDX-License-Identifier: Apache-2.0
"""Writes the bundled synthetic demo corpus under data/demo.

Twelve groups with the published group profiles, five weeks, 2,420 messages.
G4 and G7 are silent in week 0 and G8 in weeks 0-2, leaving 55 group-weeks.
code_human is drawn from a fixed code mix (survey-study groups lean towards
creation); code_pred agrees with it about 60% of the time.
"""
import csv
import pathlib

import numpy as np

SEED = 20240601
TOTAL = 2420

GROUPS = [
    ("G1", "SS", "Industry-mixed", "Hetero", "Fail", 3),
    ("G2", "DS", "Teacher-Student Mixed", "Hetero", "Pass", 5),
    ("G3", "SS", "Industry-mixed", "Hetero", "Excellent", 3),
    ("G4", "MS", "All Students", "Homo", "Excellent", 4),
    ("G5", "MS", "Teacher-Student Mixed", "Hetero", "Pass", 5),
    ("G6", "SS", "All Students", "Homo", "Good", 7),
    ("G7", "SS", "All Teachers", "Homo", "Good", 3),
    ("G8", "SS", "All Students", "Homo", "Pass", 3),
    ("G9", "SS", "Teacher-Student Mixed", "Hetero", "Excellent", 6),
    ("G10", "DS", "Industry-mixed", "Hetero", "Good", 3),
    ("G11", "SS", "Teacher-Student Mixed", "Hetero", "Good", 5),
    ("G12", "DS", "All Students", "Homo", "Excellent", 5),
]
ABSENT = {("G4", 0), ("G7", 0), ("G8", 0), ("G8", 1), ("G8", 2)}

CODES = ["I", "O1", "O2", "W1", "W2", "W3", "S1", "S2", "S3", "C1"]
LEVEL = {"I": "I", "O1": "O", "O2": "O", "W1": "W", "W2": "W", "W3": "W", "S1": "S", "S2": "S", "S3": "S", "C1": "C"}
BASE_MIX = np.array([0.12, 0.12, 0.08, 0.15, 0.10, 0.08, 0.12, 0.10, 0.07, 0.06])

TEMPLATES = {
    "I": ["haha see you all tomorrow", "did anyone watch the match", "good night everyone"],
    "O1": ["I uploaded the file to the shared folder", "the meeting link is posted above"],
    "O2": ["how do I edit the shared document?", "where is the submission button?"],
    "W1": ["let's split the survey into three parts", "I suggest we finish the outline by Friday"],
    "W2": ["who will take care of the interview questions?", "can you handle the literature part?"],
    "W3": ["we are behind schedule on the report", "the draft of section two is done"],
    "S1": ["I think the sample should include teachers", "in my view the data supports the first idea"],
    "S2": ["why would that model apply to our case?", "what evidence do we have for this claim?"],
    "S3": ["building on your point, we could compare both schools", "I agree and would add the cost factor"],
    "C1": ["here is our integrated framework for the final design", "combining all inputs, the prototype now has three modules"],
}


def main() -> None:
    rng = np.random.default_rng(SEED)
    root = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"
    root.mkdir(parents=True, exist_ok=True)

    with open(root / "groups.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["group_id", "problem_type", "composition", "homogeneity", "quality", "n_members"])
        w.writerows(GROUPS)

    cells = [(g, wk) for g, *_ in GROUPS for wk in range(5) if (g, wk) not in ABSENT]
    members = {g[0]: g[5] for g in GROUPS}
    weight = np.array([members[g] * rng.uniform(0.6, 1.4) for g, _ in cells])
    sizes = rng.multinomial(TOTAL, weight / weight.sum())

    rows = []
    for (gid, week), size in zip(cells, sizes):
        mix = BASE_MIX.copy()
        ptype = next(p for g, p, *_ in GROUPS if g == gid)
        if ptype == "SS":
            mix[CODES.index("C1")] += 0.05
        mix *= rng.uniform(0.5, 1.5, size=len(mix))
        mix /= mix.sum()
        rows.append((gid, week, rng.choice(CODES, size=size, p=mix)))

    with open(root / "utterances.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["utterance_id", "group_id", "week", "seq", "speaker_id", "text", "code_human", "code_pred"])
        seq = {g[0]: 0 for g in GROUPS}
        uid = 0
        for gid, week, codes in rows:
            for code in codes:
                draw = rng.uniform()
                if draw < 0.60:
                    pred = code
                else:
                    same_level = [c for c in CODES if LEVEL[c] == LEVEL[code] and c != code]
                    if draw < 0.85 and same_level:
                        pred = rng.choice(same_level)
                    else:
                        pred = rng.choice([c for c in CODES if c != code])
                text = rng.choice(TEMPLATES[code])
                speaker = f"{gid}-m{rng.integers(1, members[gid] + 1)}"
                w.writerow([f"u{uid:05d}", gid, week, seq[gid], speaker, text, code, pred])
                seq[gid] += 1
                uid += 1


if __name__ == "__main__":
    main()
