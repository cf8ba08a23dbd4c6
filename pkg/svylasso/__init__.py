# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

__version__ = "1.0.0"
