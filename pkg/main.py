import sys

from hyperbench.cli import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nRun interrupted.\n")
        sys.exit(130)
