# Copyright 2026 The HEC Authors
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

"""Checks hec-verify --json output against the report schema.

usage: validate_reports.py HEC_VERIFY SCHEMA CORPUS_DIR
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

EXIT = {"equivalent": 0, "not-equivalent": 1, "unknown": 2}

HAND_PAIRS = [
    ("and_xor_baseline", "and_xor_hoisted"),
    ("and_xor_baseline", "and_xor_demorgan"),
    ("and_xor_baseline", "and_xor_tiled"),
    ("and_xor_baseline", "and_xor_unrolled"),
    ("copy_loop", "copy_loop_nested_unroll"),
    ("counter_offset_range", "counter_offset_range_unrolled"),
    ("shift_copy_increment", "shift_copy_increment_fused"),
]


def main():
    verify, schema_path, corpus = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    validator = jsonschema.Draft202012Validator(json.loads(schema_path.read_text()))
    runs = [([str(corpus / f"{a}.mlir"), str(corpus / f"{b}.mlir")], None) for a, b in HAND_PAIRS]
    runs.append(([str(corpus / "and_xor_baseline.mlir"), str(corpus / "and_xor_unrolled.mlir"),
                  "--enode-limit", "10"], "unknown"))
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([verify, "--generate-corpus", tmp], check=True, capture_output=True)
        for a in sorted(pathlib.Path(tmp).glob("*.a.mlir")):
            runs.append(([str(a), str(a).replace(".a.mlir", ".b.mlir")], None))
        for args, want in runs:
            proc = subprocess.run([verify, "--json", *args], capture_output=True, text=True)
            report = json.loads(proc.stdout)
            errors = list(validator.iter_errors(report))
            name = " ".join(pathlib.Path(x).name for x in args[:2])
            for e in errors:
                print(f"{name}: {e.json_path}: {e.message}")
            if proc.returncode != EXIT[report["verdict"]]:
                errors.append(None)
                print(f"{name}: exit {proc.returncode} for {report['verdict']}")
            if want and report["verdict"] != want:
                errors.append(None)
                print(f"{name}: verdict {report['verdict']}, expected {want}")
            failures += bool(errors)
    print(f"{len(runs)} reports, {failures} invalid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
