#!/usr/bin/env python3
"""Validate pattern-gauge output directories.

For each directory: report.json must match schema/report.schema.json, every
listed artifact must exist, and every check's pass flag must follow from its
stored lhs, rhs and tolerance.
"""
import json
import os
import sys

import jsonschema


def recompute(check):
    margin = check["rhs"] - check["lhs"]
    if abs(margin - check["margin"]) > 1e-12 * (1.0 + abs(margin)):
        return "margin does not equal rhs - lhs"
    if (margin >= -check["tolerance"]) != check["pass"]:
        return "pass flag disagrees with margin and tolerance"
    return None


def all_checks(report):
    yield from report.get("checks", [])
    for point in report.get("points", []):
        yield from point.get("report", {}).get("checks", [])


def validate(out_dir, schema):
    problems = []
    with open(os.path.join(out_dir, "report.json")) as fh:
        report = json.load(fh)
    validator = jsonschema.Draft202012Validator(schema)
    for err in validator.iter_errors(report):
        path = "$" + "".join(f"[{p!r}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        problems.append(f"{path}: {err.message}")
    for rel in report.get("artifacts", []):
        if not os.path.isfile(os.path.join(out_dir, rel)):
            problems.append(f"artifact missing: {rel}")
    for check in all_checks(report):
        why = recompute(check)
        if why:
            problems.append(f"check {check['id']} ({check['state']}): {why}")
    return problems


def main(argv):
    if len(argv) < 3:
        print("usage: validate_report.py SCHEMA OUT_DIR...", file=sys.stderr)
        return 1
    with open(argv[1]) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    failed = False
    for out_dir in argv[2:]:
        problems = validate(out_dir, schema)
        for p in problems:
            print(f"{out_dir}: {p}")
        print(f"{out_dir}: {'ok' if not problems else 'INVALID'}")
        failed = failed or bool(problems)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
