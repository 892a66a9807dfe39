import sys

from pclab.cli import main

sys.exit(main())
