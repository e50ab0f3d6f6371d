import sys

from pmrecon.cli import main

sys.exit(main())
