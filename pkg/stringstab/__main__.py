"python -m stringstab"

from stringstab.apis.cli_api_v1 import main

if __name__ == "__main__":
    raise SystemExit(main())
