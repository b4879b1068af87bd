"""Sublinear one-sided cycle-freeness tester for bounded-degree graphs."""
