"""Prefect flows behind the command-line interface."""
