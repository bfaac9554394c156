#!/usr/bin/env python3
# Copyright 2026 The OncoAgent Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the multi-rater annotation fixtures for the eleven evaluation cases.

Each case gets four rater files. Individual raters disagree on some items,
but the per-item majority (adverse label on ties, "no" on boolean ties)
reproduces the published totals. The script recomputes those totals with its
own vote rules and refuses to write anything that misses them.
"""
import collections
import json
import pathlib
import random
import sys

RATERS = ["r1", "r2", "r3", "r4"]
CITATION = ["correct", "irrelevant", "wrong"]
STATEMENT = ["correct", "wrong", "harmful"]

# (tool, expected, actual) per case after majority vote.
TOOLS = {
    "A": [("gpt4v", 1, 1), ("histo", 1, 1)],
    "B": [("gpt4v", 1, 1), ("histo", 1, 1)],
    "D": [("gpt4v", 1, 1), ("histo", 1, 1), ("oncokb", 1, 1), ("google", 1, 1)],
    "G": [("medsam", 2, 2), ("calculator", 1, 1)],
    "Le": [("gpt4v", 1, 1), ("google", 1, 1), ("pubmed", 1, 0)],
    "Lo": [("gpt4v", 1, 1), ("histo", 1, 1)],
    "S": [("gpt4v", 1, 1), ("histo", 1, 1)],
    "T": [("gpt4v", 1, 1)],
    "W": [("medsam", 2, 2), ("histo", 1, 1), ("oncokb", 1, 1), ("calculator", 1, 1)],
    "X": [("medsam", 2, 2), ("histo", 1, 1), ("oncokb", 2, 2), ("google", 1, 1), ("pubmed", 1, 1),
          ("calculator", 1, 1)],
    "Z": [("gpt4v", 1, 1), ("histo", 0, 1)],
}
CASES = list(TOOLS)
STATEMENTS = [12, 11, 14, 13, 12, 10, 11, 9, 15, 21, 12]
CITATIONS = [14, 13, 17, 16, 15, 12, 13, 10, 19, 27, 15]
SUBQUESTIONS = [3, 3, 4, 3, 4, 3, 3, 2, 4, 5, 3]
KEYWORDS = [6, 5, 7, 6, 6, 5, 6, 5, 7, 8, 6]

TARGET = {
    "statements": {"correct": 131, "wrong": 6, "harmful": 3},
    "citations": {"correct": 141, "irrelevant": 11, "wrong": 3, None: 16},
    "helpfulness": 33,
    "completeness": 63,
    "tool_use": (32, 33),
}

KEYWORD_POOL = [
    "FOLFOX and bevacizumab", "FOLFIRI", "encorafenib and cetuximab", "crizotinib", "entrectinib",
    "pembrolizumab", "MSI-high", "RECIST progression", "tumor board", "next-generation sequencing",
    "liver metastasis", "CAPOX", "panitumumab", "RAS wild-type", "dose reduction", "palliative care",
    "radiotherapy", "repeat biopsy", "CEA monitoring", "second-line therapy",
]
QUESTION_POOL = [
    "Which systemic therapy is indicated next?", "Is the disease progressing on imaging?",
    "Which targeted options exist for the detected mutation?", "Should immunotherapy be considered?",
    "What additional testing is required?", "How should response be monitored?",
]


def vote(labels, hierarchy):
    counts = collections.Counter(labels)
    top = max(counts.values())
    return [l for l in hierarchy if counts[l] == top][-1]


def citation_vote(labels):
    rated = [l for l in labels if l is not None]
    if (len(labels) - len(rated)) * 2 > len(labels):
        return None
    return vote(rated, CITATION)


def count_vote(values, prefer_low):
    counts = collections.Counter(values)
    top = max(counts.values())
    tied = sorted(v for v, c in counts.items() if c == top)
    return tied[0] if prefer_low else tied[-1]


def label_patterns(target, hierarchy):
    others = [l for l in hierarchy if l != target]
    patterns = [[target] * 4]
    patterns += [[target] * 3 + [o] for o in others]
    patterns.append([target, target] + others)
    # A two-two split resolves to the more adverse label.
    patterns += [[target, target, o, o] for o in others if hierarchy.index(o) < hierarchy.index(target)]
    return patterns


def rater_labels(rnd, target, hierarchy):
    votes = list(rnd.choice(label_patterns(target, hierarchy)))
    rnd.shuffle(votes)
    return votes


def citation_labels(rnd, target):
    if target is None:
        votes = rnd.choice([[None] * 4, [None] * 3 + [rnd.choice(CITATION)]])
    elif rnd.random() < 0.1:
        votes = [target, target, None, None]
    else:
        votes = rater_labels(rnd, target, CITATION)
    votes = list(votes)
    rnd.shuffle(votes)
    return votes


def bool_votes(rnd, target):
    yes = rnd.choice([3, 4]) if target else rnd.choice([0, 1, 2])
    votes = [True] * yes + [False] * (4 - yes)
    rnd.shuffle(votes)
    return votes


def count_votes(rnd, value, prefer_low):
    r = rnd.random()
    if r < 0.15:
        # Two-two tie: expected keeps the larger, actual the smaller value.
        other = value - 1 if not prefer_low else value + 1
        if other >= 0:
            votes = [value, value, other, other]
            rnd.shuffle(votes)
            return votes
    if r < 0.35:
        votes = [value] * 3 + [value + 1]
        rnd.shuffle(votes)
        return votes
    return [value] * 4


def spread(rnd, sizes, labels):
    """Assign a flat list of majority labels to cases of the given sizes."""
    flat = []
    for label, n in labels.items():
        flat += [label] * n
    assert len(flat) == sum(sizes)
    rnd.shuffle(flat)
    out, pos = [], 0
    for n in sizes:
        out.append(flat[pos:pos + n])
        pos += n
    return out


def build(seed):
    rnd = random.Random(seed)
    statements = spread(rnd, STATEMENTS, TARGET["statements"])
    citations = spread(rnd, CITATIONS, TARGET["citations"])
    answered = spread(rnd, SUBQUESTIONS, {True: TARGET["helpfulness"], False: sum(SUBQUESTIONS) - TARGET["helpfulness"]})
    covered = spread(rnd, KEYWORDS, {True: TARGET["completeness"], False: sum(KEYWORDS) - TARGET["completeness"]})

    files = {}
    for ci, case in enumerate(CASES):
        per_rater = {r: {"rater_id": r, "case_id": case, "tool_expectations": [], "statement_labels": [],
                         "citation_labels": [], "helpfulness_labels": [], "completeness_keywords": []}
                     for r in RATERS}
        for tool, expected, actual in TOOLS[case]:
            ev = count_votes(rnd, expected, prefer_low=False)
            av = count_votes(rnd, actual, prefer_low=True)
            for i, r in enumerate(RATERS):
                per_rater[r]["tool_expectations"].append(
                    {"tool": tool, "expected_count": ev[i], "actual_count": av[i]})
        for target in statements[ci]:
            for r, l in zip(RATERS, rater_labels(rnd, target, STATEMENT)):
                per_rater[r]["statement_labels"].append(l)
        for target in citations[ci]:
            for r, l in zip(RATERS, citation_labels(rnd, target)):
                per_rater[r]["citation_labels"].append(l)
        for qi, target in enumerate(answered[ci]):
            q = QUESTION_POOL[(ci + qi) % len(QUESTION_POOL)]
            for r, v in zip(RATERS, bool_votes(rnd, target)):
                per_rater[r]["helpfulness_labels"].append({"subquestion": q, "answered": v})
        for ki, target in enumerate(covered[ci]):
            k = KEYWORD_POOL[(3 * ci + ki) % len(KEYWORD_POOL)]
            for r, v in zip(RATERS, bool_votes(rnd, target)):
                per_rater[r]["completeness_keywords"].append({"keyword": k, "covered": v})
        # Tool listing order varies between raters.
        for r in RATERS:
            rnd.shuffle(per_rater[r]["tool_expectations"])
            files[(case, r)] = per_rater[r]
    return files


def recompute(files):
    by_case = collections.defaultdict(list)
    for (case, _), a in sorted(files.items()):
        by_case[case].append(a)
    st = collections.Counter()
    cit = collections.Counter()
    help_yes = comp_yes = tool_num = tool_den = 0
    for raters in by_case.values():
        n = len(raters[0]["statement_labels"])
        for i in range(n):
            st[vote([a["statement_labels"][i] for a in raters], STATEMENT)] += 1
        for i in range(len(raters[0]["citation_labels"])):
            cit[citation_vote([a["citation_labels"][i] for a in raters])] += 1
        for i in range(len(raters[0]["helpfulness_labels"])):
            help_yes += sum(a["helpfulness_labels"][i]["answered"] for a in raters) * 2 > len(raters)
        for i in range(len(raters[0]["completeness_keywords"])):
            comp_yes += sum(a["completeness_keywords"][i]["covered"] for a in raters) * 2 > len(raters)
        tools = {t["tool"] for t in raters[0]["tool_expectations"]}
        for tool in tools:
            rows = [next(t for t in a["tool_expectations"] if t["tool"] == tool) for a in raters]
            e = count_vote([t["expected_count"] for t in rows], prefer_low=False)
            c = count_vote([t["actual_count"] for t in rows], prefer_low=True)
            tool_num += min(e, c)
            tool_den += e
    return {"statements": dict(st), "citations": dict(cit), "helpfulness": help_yes, "completeness": comp_yes,
            "tool_use": (tool_num, tool_den)}


def main():
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[2] / "fixtures/eval/annotations"
    files = build(seed=20240404)
    got = recompute(files)
    if got != TARGET:
        sys.exit("fixture totals do not match: %r" % (got,))
    for (case, rater), a in files.items():
        path = out / case / (rater + ".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(a, indent=1) + "\n")
    print("wrote %d files to %s" % (len(files), out))


if __name__ == "__main__":
    main()
