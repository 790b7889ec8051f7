import sys

from calpha.cli import main

sys.exit(main())
