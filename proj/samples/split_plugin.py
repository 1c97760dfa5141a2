#!/usr/bin/env python3
"""F-system plugin: side A gets the odd frequencies 1, 3, ..., 2k-1 and side B
the even ones 2, 4, ..., 2k. Valid for ratio 2 with lambda 0.

    bifreq verify --system "plugin:python3 samples/split_plugin.py" --r 2 --lambda 0
"""
import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    k = req["k"]
    first = 1 if req["side"] == "A" else 2
    print(json.dumps({"freqs": list(range(first, 2 * k + 1, 2))}), flush=True)
