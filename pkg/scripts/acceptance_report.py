"""Run the acceptance suite and print one PASS/FAIL line per criterion."""
import os
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))

if __name__ == "__main__":
    sys.exit(pytest.main(["-q", os.path.join(HERE, "..", "tests", "test_acceptance.py")]))
