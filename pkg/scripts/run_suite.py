"""Run the full suite twice into separate directories and confirm byte-identical output."""
import argparse
import filecmp
import subprocess
import sys
from pathlib import Path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="suite_out")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    paths = []
    for run in ("run1", "run2"):
        path = Path(args.out) / run / "suite.json"
        code = subprocess.call([sys.executable, "-m", "heisenlab", "suite", "--seed", str(args.seed),
                                "--output", str(path)])
        if code != 0:
            sys.exit(code)
        paths.append(path)
    same = all(filecmp.cmp(paths[0].with_suffix(s), paths[1].with_suffix(s), shallow=False) for s in (".json", ".csv"))
    print("byte-identical" if same else "outputs differ")
    sys.exit(0 if same else 1)


if __name__ == "__main__":
    main()
