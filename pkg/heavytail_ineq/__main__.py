"""Module entry point."""

from heavytail_ineq import main

if __name__ == "__main__":
    raise SystemExit(main())
