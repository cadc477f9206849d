"""Plausibility measures on finite test spaces."""
