"""First vs last influence on BA and ER graphs; writes results/figure2/*.csv."""
from _common import run_config

if __name__ == "__main__":
    run_config("figure2", __doc__)
