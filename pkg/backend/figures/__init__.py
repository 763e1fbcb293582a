"""Figure data products and single-point queries."""
