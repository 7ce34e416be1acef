from m2msim.cli import main
import sys

sys.exit(main())
