"""
BFA-ELM flight performance toolkit

Entry point for the command line; every subcommand lives in
utils/command_system.py.

    python main.py generate --n 200 --noise 0.02 --seed 42 --out data.csv
    python main.py train --data data.csv --out model.json
    python main.py compare --seeds 20 --out comparison
"""
import sys

from utils.command_system import run_main


def main():
    sys.exit(run_main())


if __name__ == "__main__":
    main()
