import sys

from beltgrip.cli import main

sys.exit(main())
