#!/usr/bin/env python3
"""Runs the pattern-gauge binary on shipped scenarios and validates what it writes.

usage: cli_end_to_end.py BINARY SOURCE_DIR OUT_DIR
"""
import json
import pathlib
import subprocess
import sys


def run(binary, *args):
    proc = subprocess.run([binary, *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout + proc.stderr


def main():
    binary, src, out = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    out.mkdir(parents=True, exist_ok=True)
    scen = src / "scenarios"
    failures = []

    def expect(cond, what):
        print(("ok   " if cond else "FAIL ") + what)
        if not cond:
            failures.append(what)

    bad = out / "typo.json"
    bad.write_text(json.dumps({"domain": {"gallery": "disk", "params": {"r": 1}},
                               "nonlinearty": {"id": "allen_cahn", "params": {"eps": 0.3}}}))
    code, text = run(binary, "verify", str(bad), "--out", str(out / "typo"))
    expect(code == 1, "misspelled key exits 1")
    expect("nonlinearty" in text, "error names the offending key")

    code, _ = run(binary, "verify", str(scen / "missing.json"))
    expect(code == 1, "missing config exits 1")
    code, _ = run(binary, "frobnicate", str(scen / "disk_allen_cahn.json"))
    expect(code == 1, "unknown command exits 1")

    runs = [
        ("verify", "rectangle_cosx.json", []),
        ("verify", "disk_allen_cahn.json", []),
        ("mesh", "peanut_matano.json", ["--h", "0.1"]),
        ("spectrum", "disk_spectrum.json", ["--h", "0.08"]),
        ("sweep", "disk_eta_sweep.json", ["--h", "0.1"]),
    ]
    dirs = []
    for cmd, cfg, extra in runs:
        d = out / f"{cmd}_{pathlib.Path(cfg).stem}"
        code, text = run(binary, cmd, str(scen / cfg), "--out", str(d), *extra)
        expect(code == 0, f"{cmd} {cfg} exits 0")
        if code != 0:
            print(text)
        dirs.append(str(d))

    report = json.loads((out / "verify_disk_allen_cahn" / "report.json").read_text())
    expect(report["summary"]["stable_pattern_found"] is False, "disk control finds no stable pattern")
    seeded = out / "verify_disk_allen_cahn_seed"
    run(binary, "verify", str(scen / "disk_allen_cahn.json"), "--out", str(seeded), "--seed", "11")
    expect(json.loads((seeded / "report.json").read_text())["seed"] == 11, "--seed reaches the report")

    proc = subprocess.run([sys.executable, str(src / "tools" / "validate_report.py"),
                           str(src / "schema" / "report.schema.json"), *dirs])
    expect(proc.returncode == 0, "reports validate against the schema")

    if failures:
        print(f"{len(failures)} failure(s)")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
