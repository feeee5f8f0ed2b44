"""Run the CLI on the bundled fixtures and validate every document it prints."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def run(tool, *args):
    proc = subprocess.run([tool, *args], capture_output=True, text=True)
    return proc.returncode, json.loads(proc.stdout)


def main():
    tool, root = sys.argv[1], Path(sys.argv[2])
    schema = json.loads((root / "schemas" / "result.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    data = root / "data"
    with tempfile.TemporaryDirectory() as tmp:
        gauss = str(Path(tmp) / "gauss.csv")
        cases = [
            (0, ["generate", "--kind", "two-gaussians", gauss, "--per-class", "40", "--dim", "4"]),
            (0, ["rank", str(data / "vandermonde_11x1001.csv"), "--n-sensors", "10"]),
            (0, ["reconstruct", str(data / "vandermonde_11x1001.csv"), "--test",
                 str(data / "abs_quadratic_1001.csv"), "--sensor-range", "2..11"]),
            (0, ["classify", gauss, "--basis", "svd", "--modes", "3"]),
            (0, ["classify", str(data / "digits.csv"), "--basis", "svd", "--modes", "10",
                 "--n-sensors", "10", "--l1-penalty", "0.001"]),
            (None, ["rank", str(Path(tmp) / "missing.csv")]),
            (None, ["reconstruct", str(data / "vandermonde_11x1001.csv"), "--sensor-range", "4..2"]),
        ]
        failures = 0
        for expected_code, args in cases:
            code, doc = run(tool, *args)
            errors = sorted(validator.iter_errors(doc), key=str)
            ok = not errors and (code == 0 if expected_code == 0 else code != 0 and "error" in doc)
            print(("ok   " if ok else "FAIL ") + " ".join(args[:2]), f"exit={code}")
            for e in errors:
                print("     ", e.message)
            failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
