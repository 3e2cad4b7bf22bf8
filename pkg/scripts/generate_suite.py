#!/usr/bin/env python3
"""Write the five-task synthetic benchmark suite to a directory.

Each task gets a train set (replica 0), a held-out eval set (replica 1,
same confusion structure, fresh instances), and its generator profile.

    python3 scripts/generate_suite.py --out data/suite
"""
import argparse
import sys

from dcs.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--dataset-format", choices=("csv", "json"), default="csv"
    )
    args = parser.parse_args()
    return cli_main(
        ["generate", "--out", args.out, "--dataset-format", args.dataset_format]
    )


if __name__ == "__main__":
    sys.exit(main())
