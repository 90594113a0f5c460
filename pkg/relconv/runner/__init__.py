"""Parallel job execution and the verification pipeline."""
