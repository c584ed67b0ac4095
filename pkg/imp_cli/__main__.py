import sys
from imp_cli.commands import main

sys.exit(main())
