"""Runs the ecpm tool in JSON mode and validates its output against the shipped schemas."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

ecpm, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())
validator = jsonschema.Draft202012Validator(schemas["output.schema.json"], registry=registry)
kraus_validator = jsonschema.Draft202012Validator(schemas["kraus.schema.json"])

runs = [
    ["classical-bound", "--omega-grid", "0,0.25,0.49"],
    ["seesaw-icorr", "--omega-grid", "0.2", "--restarts", "2", "--seed", "3"],
    ["analytic", "--omega", "0.1,0.3"],
    ["guess-prob", "--omega-grid", "0.1", "--iexp", "2.0", "--restarts", "1"],
    ["det-violation", "--omega-grid", "0.2", "--restarts", "2"],
    ["norms", "--channel", "family:0.3", "--restarts", "2"],
]
for args in runs:
    out = subprocess.run([ecpm, *args, "--format", "json"], check=False, capture_output=True, text=True)
    if out.returncode != 0:
        sys.exit(f"{args}: exit {out.returncode}\n{out.stderr}")
    doc = json.loads(out.stdout)
    validator.validate(doc)
    assert set(doc["columns"]) == set(doc["rows"][0].keys())
    for row in doc["rows"]:
        if "kraus" in row:
            kraus_validator.validate(row["kraus"])
    print("valid:", " ".join(args))

# An infeasible target still yields a schema-conforming status row.
out = subprocess.run([ecpm, "guess-prob", "--omega-grid", "0.1", "--iexp", "2.0", "--restarts", "1", "--format", "json"],
                     check=True, capture_output=True, text=True)
assert json.loads(out.stdout)["rows"][0]["status"] == "infeasible"
