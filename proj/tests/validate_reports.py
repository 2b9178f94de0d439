#!/usr/bin/env python3
"""Runs every tat command and validates the JSON reports against the schema."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def main():
    tat, data, schema_path = sys.argv[1:4]
    with open(schema_path) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    d = lambda *p: os.path.join(data, *p)
    runs = {
        "bound": ["bound", "--curve", d("curves", "e1.curve"), "--variety", d("varieties", "bound_n3.variety")],
        "bound_pole": ["bound", "--curve", d("planted", "01.curve"), "--variety", d("planted", "01.variety"),
                       "--constants", d("constants", "example_n3.constants")],
        "scan": ["scan", "--curve", d("planted", "01.curve"), "--variety", d("planted", "01.variety"),
                 "--max-degree", "36", "--max-order", "2"],
        "scan_generic": ["scan", "--curve", d("curves", "e1.curve"), "--variety", d("varieties", "generic_n3.variety"),
                         "--max-degree", "6", "--max-order", "1"],
        "enumerate": ["enumerate", "--curve", d("curves", "e37.curve"), "--max-degree", "12", "--max-order", "2"],
        "enumerate_cm": ["enumerate", "--curve", d("curves", "cm_i.curve"), "--max-degree", "9"],
        "heights": ["heights", "--curve", d("curves", "e1.curve"), "-3,12", "1,0; -3,-12"],
        "heights_search": ["heights", "--curve", d("curves", "e37.curve")],
        "approx": ["approx", "--curve", d("curves", "e1.curve"), "--point", "-3,12; -3,-12", "--max-degree", "12"],
        "selftest": ["selftest"],
    }
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, args in runs.items():
            out = os.path.join(tmp, name + ".json")
            proc = subprocess.run([tat, *args, "--out", out], capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"{name}: exit {proc.returncode}\n{proc.stderr}")
                failures += 1
                continue
            with open(out) as fh:
                report = json.load(fh)
            errors = list(validator.iter_errors(report))
            print(f"{name}: {'valid' if not errors else 'INVALID'}")
            for e in errors[:5]:
                print("   ", e.message[:300], list(e.absolute_path))
            failures += bool(errors)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
