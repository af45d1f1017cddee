"""First vs last influence on a hub-and-spoke graph; writes results/figure5/*.csv."""
from _common import run_config

if __name__ == "__main__":
    run_config("figure5", __doc__)
