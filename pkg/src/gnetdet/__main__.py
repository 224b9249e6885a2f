import sys

from gnetdet.cli import main

sys.exit(main())
