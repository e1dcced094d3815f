"""Command and export helpers for the variational app."""
