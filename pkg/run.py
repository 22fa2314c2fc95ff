#!/usr/bin/env python3
"""
Run script for the egomap command-line tool
"""

import sys

from app import cli_dispatch


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
