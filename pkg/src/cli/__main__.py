import sys

from src.cli.commands import run

if __name__ == "__main__":
    sys.exit(run())
