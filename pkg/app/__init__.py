"""Application layer: configuration and the pad-sim command line."""
