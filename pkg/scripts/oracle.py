"""Exact expected outcome of every full-budget schedule on a 4-node population."""
from _common import run_config

if __name__ == "__main__":
    run_config("oracle", __doc__)
