import sys

from kcsp.cli import main

sys.exit(main())
