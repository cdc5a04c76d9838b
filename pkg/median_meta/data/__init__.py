"""Shipped study tables."""

from pathlib import Path

# 50 synthetic patient-delay studies: 16 with quartiles, 18 with only a
# range, 16 with a bare median; one study lacks n and one dominant
# outlier study holds 6000 subjects
PATIENT_DELAY_FIXTURE = Path(__file__).with_name(
    "patient_delay_fixture.csv"
)
