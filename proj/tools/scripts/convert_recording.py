#!/usr/bin/env python3
# Copyright 2026 The reckon-emu Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Convert an external spike recording into the emulator's text stream.

The input is a CSV with one spike per row and a header naming at least

    sample,label,timestamp_us,channel

Rows may be in any order. Timestamps are absolute or per-sample; each
sample is shifted so its first spike lands on tick 0, then binned into
ticks of --tick-us microseconds. Channels must already be mapped onto the
24 input addresses. For DVS recordings of the robot arm this means
pooling pixel addresses into the 24 channels before export (the mapping
depends on the sensor setup and is not part of this script).

Example:

    tools/scripts/convert_recording.py arm.csv -o arm.aer --tick-us 1000
    reckon validate arm.aer
"""

import argparse
import csv
import sys
from collections import defaultdict

N_IN = 24


def parse_args(argv):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("csv", help="input CSV (sample,label,timestamp_us,channel)")
    p.add_argument("-o", "--out", required=True, help="output .aer text stream")
    p.add_argument("--tick-us", type=int, default=1000, help="tick length in microseconds")
    p.add_argument("--duration-ticks", type=int, default=0,
                   help="fixed sample duration; default is last spike tick + 1")
    return p.parse_args(argv)


def load(path):
    spikes = defaultdict(list)
    labels = {}
    with open(path, newline="") as f:
        for n, row in enumerate(csv.DictReader(f), start=2):
            sample = row["sample"]
            label = int(row["label"])
            if labels.setdefault(sample, label) != label:
                sys.exit(f"{path}:{n}: sample {sample} has two labels")
            channel = int(row["channel"])
            if not 0 <= channel < N_IN:
                sys.exit(f"{path}:{n}: channel {channel} outside 0..{N_IN - 1}")
            spikes[sample].append((int(row["timestamp_us"]), channel))
    return spikes, labels


def convert(spikes, labels, tick_us, duration_ticks):
    lines = ["!version 1", f"!n_in {N_IN}", f"!tick_us {tick_us}", "!mode classification"]
    for sample in sorted(spikes, key=lambda s: (len(s), s)):
        events = sorted(spikes[sample])
        t0 = events[0][0]
        ticked = [((ts - t0) // tick_us, ch) for ts, ch in events]
        duration = duration_ticks or ticked[-1][0] + 1
        lines.append(f"# sample {sample}")
        lines.extend(f"E {ch} {tick}" for tick, ch in ticked if tick < duration)
        lines.append(f"T {duration} {labels[sample]}")
        lines.append(f"X {duration}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    args = parse_args(argv)
    if args.tick_us <= 0:
        sys.exit("--tick-us must be positive")
    spikes, labels = load(args.csv)
    if not spikes:
        sys.exit(f"{args.csv}: no spikes")
    with open(args.out, "w") as f:
        f.write(convert(spikes, labels, args.tick_us, args.duration_ticks))


if __name__ == "__main__":
    main()
