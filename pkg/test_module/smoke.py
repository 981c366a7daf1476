import os
import sys
import tempfile
from pathlib import Path

import orjson
from click.testing import CliRunner
from dotenv import load_dotenv

from cli_module.main import cli

load_dotenv()

EPOCHS = os.environ.get("SMOKE_EPOCHS", "5")

def check(name, cond, detail=""):
    if cond:
        print(f"[OK] {name}")
    else:
        print(f"[FAIL] {name} {detail}".strip())
        sys.exit(1)

def main():
    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        dataset = tmp / "smoke.csv"

        r = runner.invoke(cli, ["synth", str(dataset), "--nodes-per-block", "10", "--noise", "0.05"])
        check("synth exit code", r.exit_code == 0, f"(got {r.exit_code}: {r.output})")

        r = runner.invoke(cli, ["gradcheck"])
        check("gradcheck all variants", r.exit_code == 0, r.output)

        out = tmp / "runs"
        r = runner.invoke(cli, [
            "run", str(dataset), "--task", "all", "--variant", "kasgcn-bspline", "--output-dir", str(out),
            "--set", f"epochs={EPOCHS}", "--set", "repeats=2", "--set", "ks=[2]",
            "--set", "layers=[8, 8]", "--set", "reduction_dimensions=4", "--set", "timesweep_layers=[2]",
        ])
        check("run --task all exit code", r.exit_code == 0, f"(got {r.exit_code}: {r.output})")

        report = orjson.loads((out / "smoke_kasgcn-bspline_linksign_42_report.json").read_bytes())
        auc = report["kasgcn-bspline"]["metrics"]["auc"]["mean"]
        check("linksign auc in [0, 1]", 0.0 <= auc <= 1.0, f"(got {auc})")

        report = orjson.loads((out / "smoke_kasgcn-bspline_cluster_42_report.json").read_bytes())
        q = report["kasgcn-bspline"]["metrics"]["q@K2"]["mean"]
        check("cluster Q in [0, 2]", 0.0 <= q <= 2.0, f"(got {q})")

        check("manifest written", (out / "smoke_kasgcn-bspline_all_42_manifest.toml").exists())

    print("Smoke test passed ✅")

if __name__ == "__main__":
    main()
