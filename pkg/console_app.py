#!/usr/bin/env python3
import sys

from dotenv import load_dotenv

load_dotenv()

from src.features.cli.ihcalc_cli import main


if __name__ == "__main__":
    sys.exit(main())
