import sys

from ballbody.infrastructure.adapters.input.cli_adapter import main

sys.exit(main())
