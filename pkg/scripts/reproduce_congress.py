# scripts/reproduce_congress.py
import logging
import sys

from cli_module import settings
from cli_module.main import execute_run
from cli_module.models import RunConfig

# Usage: python -m scripts.reproduce_congress <congress_edge_list> [output_dir]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        print("usage: python -m scripts.reproduce_congress <congress_edge_list> [output_dir]")
        return 2
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s %(message)s")
    output_dir = argv[1] if len(argv) > 1 else settings.OUTPUT_DIR
    for task in ("stats", "cluster", "linksign"):
        print(f"RUNNING CONGRESS {task.upper()} (SGCN vs KASGCN variants)...")
        config = RunConfig(
            dataset=argv[0],
            dataset_name="Congress",
            task=task,
            ks=[5],
            compare=True,
            output_dir=output_dir,
            jobs=settings.JOBS,
        )
        execute_run(config, progress=settings.PROGRESS)
    print("REPRODUCTION COMPLETE.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
