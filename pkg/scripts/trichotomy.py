"""Mean-field first-minus-last sweep over (p, q), budget and horizon."""
from _common import run_config

if __name__ == "__main__":
    run_config("trichotomy", __doc__)
