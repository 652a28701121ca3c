#!/usr/bin/env python3
"""Line-protocol stand-in for an external parser, used by the adapter tests.

Modes:
  echo    - answers every request with a year field holding the input string
  fields  - answers with a fixed author/year pair plus one unknown-type field
  garbage - answers with a line that is not JSON
  wrongid - answers with a mismatched request id
  hang    - never answers
"""
import json
import sys

mode = sys.argv[1] if len(sys.argv) > 1 else "echo"

for line in sys.stdin:
    req = json.loads(line)
    if mode == "hang":
        import time
        time.sleep(3600)
    if mode == "garbage":
        print("this is not json")
    elif mode == "wrongid":
        print(json.dumps({"id": "nope", "fields": []}))
    elif mode == "fields":
        print(json.dumps({
            "id": req["id"],
            "fields": [
                {"type": "author", "value": "G. Adomavicius"},
                {"type": "year", "value": "2005"},
                {"type": "confidence", "value": "0.9"},
            ],
        }))
    else:
        print(json.dumps({"id": req["id"],
                          "fields": [{"type": "year", "value": req["string"]}]}))
    sys.stdout.flush()
