import sys

from cournot_mfg.cli import main

sys.exit(main())
