import sys

from circsynth.cli import main

sys.exit(main())
