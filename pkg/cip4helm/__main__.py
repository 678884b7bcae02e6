import sys

from cip4helm.cli import main

sys.exit(main())
