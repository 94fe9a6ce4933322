#!/usr/bin/env python3
"""Runs every mph subcommand on the fixture corpus and validates its JSON output."""

import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def load_registry(schema_dir):
    schemas = {}
    registry = Registry()
    for path in sorted(schema_dir.glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name] = schema
        registry = registry.with_resource(schema["$id"], Resource.from_contents(schema))
    return schemas, registry


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mph", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--work", required=True, type=pathlib.Path)
    args = ap.parse_args()

    schemas, registry = load_registry(args.schemas)
    failures = []
    checked = 0

    def validate(name, path):
        nonlocal checked
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        errors = sorted(validator.iter_errors(json.loads(path.read_text())), key=lambda e: list(e.path))
        checked += 1
        for e in errors:
            failures.append(f"{path}: {'/'.join(map(str, e.path)) or '<root>'}: {e.message}")

    def run(*cmd):
        result = subprocess.run([args.mph, *map(str, cmd)], capture_output=True, text=True)
        if result.returncode != 0:
            failures.append(f"mph {' '.join(map(str, cmd))} exited {result.returncode}: {result.stderr.strip()}")
        return result

    work = args.work
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    fixtures = work / "fixtures"
    run("fixtures", fixtures)

    tones = sorted((fixtures / "tones").glob("*.wav"))
    reports_dir = work / "reports"
    run("analyze", *tones, "--out-dir", reports_dir, "--plots", work / "plots")
    for spec in sorted((fixtures / "tones").glob("*.json")):
        validate("tone-spec.schema.json", spec)
    for report in sorted(reports_dir.glob("*.json")):
        validate("analysis-report.schema.json", report)
        config = work / f"{report.stem}.config.json"
        config.write_text(json.dumps(json.loads(report.read_text())["config"]))
        validate("config.schema.json", config)
    for spectrum in sorted((work / "plots").glob("*/spectrum.json")):
        validate("spectrum.schema.json", spectrum)

    for reports in sorted((fixtures / "reports").glob("*.csv")):
        analysis = reports_dir / f"{reports.stem}.json"
        out = work / f"perception_{reports.stem}.json"
        run("perception", reports, analysis, "-o", out)
        validate("perception.schema.json", out)

    for trace in sorted((fixtures / "traces").glob("*.csv")):
        sample = trace.stem.split("_", 1)[1] if "_" in trace.stem else trace.stem
        analysis = reports_dir / f"{sample}.json"
        if not analysis.exists():
            analysis = reports_dir / "sine_236.json"
        out = work / f"trackers_{trace.stem}.json"
        cmd = ["trackers", trace, "-a", analysis, "-o", out]
        reports = fixtures / "reports" / f"{sample}.csv"
        if reports.exists():
            cmd += ["-r", reports]
        run(*cmd)
        validate("trackers.schema.json", out)

    partial = work / "partial_config.json"
    partial.write_text(json.dumps({"schema_version": "1.0", "window": {"length": 16384}}))
    validate("config.schema.json", partial)

    for line in failures:
        print(line)
    print(f"{checked} documents validated, {len(failures)} problems")
    return 1 if failures or checked == 0 else 0


if __name__ == "__main__":
    sys.exit(main())
