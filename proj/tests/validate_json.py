"""Runs every radbif subcommand with --format json and validates the output against schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema

RUNS = {
    "trace": [["trace", "--epsilon", "0.22"], ["trace", "--family", "cubic"]],
    "scan": [["scan", "--epsilons", "0.22,0.245"]],
    "find-eps0": [["find-eps0", "--bracket", "0.22:0.25"]],
    "verify": [["verify", "--epsilon", "0.22"], ["verify", "--family", "constant"]],
    "limiting": [["limiting"]],
    "map42": [["map42", "--epsilon", "0.5", "--count", "9"]],
    "cubic": [["cubic"]],
}


def main() -> int:
    exe, schema_dir, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)
    failures = 0

    def check(name: str, text: str, label: str) -> None:
        nonlocal failures
        schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
        try:
            jsonschema.validate(json.loads(text), schema)
            print(f"ok   {label}")
        except jsonschema.ValidationError as err:
            failures += 1
            print(f"FAIL {label}: {err.message}")

    for name, runs in RUNS.items():
        for args in runs:
            proc = subprocess.run([exe, *args, "--format", "json"], capture_output=True, text=True)
            if proc.returncode != 0:
                failures += 1
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
                continue
            check(name, proc.stdout, " ".join(args))

    dump = work / "profile.json"
    proc = subprocess.run([exe, "trace", "--quiet", "--format", "json", "--out", str(work / "curve.json"),
                           "--dump-profile", str(dump), "--profile-alpha", "3"], capture_output=True, text=True)
    if proc.returncode != 0:
        failures += 1
        print(f"FAIL profile dump: exit {proc.returncode}")
    else:
        check("profile", dump.read_text(), "trace --dump-profile")
        check("trace", (work / "curve.json").read_text(), "trace --out curve.json")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
