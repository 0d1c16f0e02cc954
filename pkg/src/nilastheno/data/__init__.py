"""Shipped example families as JSON data."""
