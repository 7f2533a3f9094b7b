import sys

from probdom.cli import main

sys.exit(main())
