"""Problem file helpers."""
