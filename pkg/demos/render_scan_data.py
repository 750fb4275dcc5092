"""Render every bundled preset to a CSV file through the command line.

The package ships one preset per standard scan.  This script runs each of
them the same way a shell user would and collects the CSV output under one
directory; the companion figure package turns those files into plots.  The
full set takes a while, dominated by the spectrum scans at their
converged hierarchy depths.

Usage: python3 render_scan_data.py [output_dir]
"""

import sys
import time
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from heomfield.cli import main as heomfield_main


def command_for(path):
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    if "sweep" in raw:
        return "sweep"
    if Path(path).name.startswith("steady"):
        return "steady"
    return "evolve"


def main(argv):
    out_dir = Path(argv[1]) if len(argv) > 1 else Path(__file__).parent / "output"
    out_dir.mkdir(parents=True, exist_ok=True)
    root = resources.files("heomfield.presets")
    paths = sorted(str(p) for p in root.iterdir() if str(p).endswith(".toml"))
    for path in paths:
        name = Path(path).stem
        command = command_for(path)
        target = out_dir / f"{name}.csv"
        shell_form = f"heomfield {command} --config {name}.toml --output {target.name}"
        print(f"$ {shell_form}")
        started = time.time()
        code = heomfield_main(
            [command, "--config", path, "--output", str(target), "--quiet"]
        )
        if code != 0:
            print(f"  failed with exit code {code}", file=sys.stderr)
            return code
        print(f"  wrote {target} in {time.time() - started:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
