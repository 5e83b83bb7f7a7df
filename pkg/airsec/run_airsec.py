#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Start airsec
"""

import sys

from airsec import cli


if __name__ == '__main__':
    sys.exit(cli.main())
