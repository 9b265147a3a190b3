#!/usr/bin/env python

import sys

from .commands import collapse, dephasing, simulate, theory
from .utils.errors import QdiffError
from .utils.opts import get_args

COMMANDS = {
    'theory': theory.main,
    'dephasing': dephasing.main,
    'simulate': simulate.main,
    'collapse': collapse.main,
}

def main(argv=None):
    """
    Runs one subcommand and returns the process exit code: 0 on success, 1 for
    configuration errors, 2 for physics-domain errors, 3 for numerical-validity errors.
    """
    try:
        args = get_args(argv)
        COMMANDS[args.command](args)
    except QdiffError as e:
        print(("error: %s" % e), file=sys.stderr, flush=True)
        return e.exit_code
    return 0

if __name__ == "__main__":
    sys.exit(main())
