"""Command helpers for the photonics app."""
