"""Definition files and function expressions."""
