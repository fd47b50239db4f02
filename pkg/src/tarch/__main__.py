import sys

from tarch.cli import main

sys.exit(main())
