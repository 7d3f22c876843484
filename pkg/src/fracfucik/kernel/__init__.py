"""Nonlocal energy over pairs with at least one point in the domain."""
