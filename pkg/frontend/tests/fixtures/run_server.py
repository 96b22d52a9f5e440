"""Start an empty trackkit service for the end-to-end tests.

Usage: python3 run_server.py <port>
"""

import sys

import uvicorn

from trackkit.service import create_app

if __name__ == "__main__":
    uvicorn.run(create_app(), host="127.0.0.1", port=int(sys.argv[1]),
                log_level="warning")
