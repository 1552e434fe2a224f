import logging
import sys

from mimo_secrecy.config import REFERENCE_CHANNEL_JSON
from mimo_secrecy.experiments import format_report, reproduce_table

logging.basicConfig(level=logging.INFO)

print(f"=== Iteration results on {REFERENCE_CHANNEL_JSON.name} ===")
report = reproduce_table()
print(format_report(report))

sys.exit(0 if report.passed else 2)
