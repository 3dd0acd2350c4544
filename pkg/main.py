"""fpdtrack - command-line entry point."""

import sys

from dotenv import load_dotenv

# Load FPD_* overrides from .env before settings are read
load_dotenv()

from src.fpdtrack.cli import main

if __name__ == "__main__":
    sys.exit(main())
