import sys

from workdeficit.cli import main

sys.exit(main())
