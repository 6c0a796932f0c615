import sys

from zzgril.cli import main

sys.exit(main())
