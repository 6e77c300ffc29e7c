"""
Running a shipped configuration
===============================

The command line drives the same code: ``realstrata run --config
sl2r_p1.cfg --out DIR`` writes TSV tables and a manifest.  Here we call it
in-process for the cheap candidates experiment.
"""
import json
import tempfile
from pathlib import Path

from realstrata import cli

cli.main(["configs"])
with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run"
    code = cli.main(["candidates", "--group", "sl3r", "--out", str(out)])
    manifest = json.loads((out / "manifest.json").read_text())
    print("exit", code, "artifacts:", sorted(a for e in manifest["experiments"].values() for a in e["artifacts"]))
    print((out / "candidates.tsv").read_text())
