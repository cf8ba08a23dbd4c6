# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import os
import sys

# The svylasso package lives in the repository root, one level up
repo_dir = os.path.abspath( os.path.join( os.path.dirname( __file__ ), os.path.pardir ) )
if not os.path.isdir( os.path.join( repo_dir, "svylasso" ) ):
    raise ImportError( "svylasso package not found in {}".format( repo_dir ) )
if repo_dir not in sys.path:
    sys.path.insert( 0, repo_dir )
