import sys

from resonance_control.main import main

sys.exit(main())
