"""Run the ellipcert command line from a source checkout."""

from ellipcert.cli.main import main

if __name__ == "__main__":
    main()
