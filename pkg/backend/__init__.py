"""Producers and writers of the figure data tables."""
