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

"""Writes the binary parts of the patient X fixture: two CT-like PGM images,
their lesion masks and a placeholder histology feature file.

Mask sizes: baseline 250 pixels, follow-up 973 pixels (ratio 3.892).
"""
import pathlib
import random
import sys

SIZE = 64


def pgm(path, blob_pixels):
    rnd = random.Random(path.name)
    rows = []
    for y in range(SIZE):
        row = bytearray()
        for x in range(SIZE):
            base = 40 + rnd.randrange(20)
            row.append(min(255, base + (150 if (x, y) in blob_pixels else 0)))
        rows.append(bytes(row))
    path.write_bytes(b"P5\n%d %d\n255\n" % (SIZE, SIZE) + b"".join(rows))


def rect_pixels(x0, y0, width, count):
    pixels = []
    y = y0
    while len(pixels) < count:
        for x in range(x0, x0 + width):
            if len(pixels) == count:
                break
            pixels.append((x, y))
        y += 1
    return set(pixels)


def pbm(path, pixels):
    lines = ["P1", "# lesion mask", "%d %d" % (SIZE, SIZE)]
    for y in range(SIZE):
        lines.append(" ".join("1" if (x, y) in pixels else "0" for x in range(SIZE)))
    path.write_text("\n".join(lines) + "\n")


def main(root):
    case = pathlib.Path(root)
    (case / "images").mkdir(parents=True, exist_ok=True)
    (case / "masks").mkdir(exist_ok=True)
    (case / "features").mkdir(exist_ok=True)
    t1 = rect_pixels(20, 24, 25, 250)
    t2 = rect_pixels(12, 14, 32, 973)
    assert len(t1) == 250 and len(t2) == 973
    pgm(case / "images" / "ct_baseline.pgm", t1)
    pgm(case / "images" / "ct_followup.pgm", t2)
    pbm(case / "masks" / "ct_baseline_mask.pbm", t1)
    pbm(case / "masks" / "ct_followup_mask.pbm", t2)
    rnd = random.Random(7)
    feats = bytes(rnd.randrange(256) for _ in range(2048))
    (case / "features" / "patient_x_slide.feat").write_bytes(feats)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/cases/patient_x")
