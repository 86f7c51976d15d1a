import sys

from rdshock.cli import main

sys.exit(main())
