import os

from dotenv import load_dotenv

load_dotenv()

# Configuration
REPORTS_DIR = os.getenv("HYPERBENCH_REPORTS_DIR", "./reports")
DEFAULT_TRUNCATION = int(os.getenv("HYPERBENCH_DEFAULT_TRUNCATION", "100000"))
DEFAULT_GRID = int(os.getenv("HYPERBENCH_DEFAULT_GRID", "4096"))
DEFAULT_RESTARTS = int(os.getenv("HYPERBENCH_RESTARTS", "32"))
DEFAULT_BUDGET = int(os.getenv("HYPERBENCH_BUDGET", "400"))

# Largest tensor (in entries) any cochain computation may materialize
SIZE_GUARD = int(os.getenv("HYPERBENCH_SIZE_GUARD", "1000000"))
