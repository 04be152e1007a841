# SPDX-License-Identifier: Apache-2.0
"""Writes the small fixed-count corpus under data/oracle.

Two groups, five weeks, prescribed code counts per week. The counts are also
written to counts.json so the SDM oracle can work from them directly.
"""
import csv
import json
import pathlib

CODES = ["O1", "O2", "W1", "W2", "W3", "S1", "S2", "S3", "C1"]

GROUPS = [
    # group_id, problem_type, composition, homogeneity, quality, n_members
    ("GA", "SS", "All Students", "Homo", "Good", 4),
    ("GB", "DS", "Industry-mixed", "Hetero", "Pass", 3),
]

# counts[group][week] in CODES order, then the number of I-coded messages
COUNTS = {
    "GA": [
        [2, 1, 3, 0, 1, 1, 0, 0, 0, 2],
        [4, 2, 5, 2, 1, 2, 1, 0, 1, 1],
        [3, 3, 6, 4, 2, 4, 2, 1, 1, 3],
        [5, 2, 4, 3, 3, 5, 3, 2, 2, 0],
        [6, 4, 7, 5, 2, 6, 4, 3, 4, 2],
    ],
    "GB": [
        [1, 0, 2, 1, 0, 0, 1, 0, 0, 1],
        [2, 1, 3, 1, 1, 1, 1, 1, 0, 0],
        [2, 2, 2, 3, 1, 3, 2, 0, 1, 2],
        [4, 1, 5, 2, 2, 2, 3, 1, 1, 1],
        [3, 3, 4, 4, 3, 4, 2, 2, 3, 0],
    ],
}


def main() -> None:
    root = pathlib.Path(__file__).resolve().parent.parent / "data" / "oracle"
    root.mkdir(parents=True, exist_ok=True)

    with open(root / "groups.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["group_id", "problem_type", "composition", "homogeneity", "quality", "n_members"])
        w.writerows(GROUPS)

    members = {g[0]: g[5] for g in GROUPS}
    with open(root / "utterances.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["utterance_id", "group_id", "week", "seq", "speaker_id", "text", "code_human", "code_pred"])
        for gid, weeks in COUNTS.items():
            seq = 0
            for week, row in enumerate(weeks):
                tokens = []
                for code, n in zip(CODES + ["I"], row):
                    tokens += [code] * n
                # interleave so codes are not blocked by type
                tokens = tokens[::2] + tokens[1::2]
                for code in tokens:
                    uid = f"{gid}-{seq:04d}"
                    speaker = f"{gid}-m{seq % members[gid] + 1}"
                    w.writerow([uid, gid, week, seq, speaker, f"{gid} week {week} message {seq} ({code})", code, code])
                    seq += 1

    with open(root / "counts.json", "w", encoding="utf-8") as f:
        json.dump({"codes": CODES, "members": members,
                   "counts": {g: [r[:9] for r in rows] for g, rows in COUNTS.items()}}, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
