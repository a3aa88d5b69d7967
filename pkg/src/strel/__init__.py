"""Relative stable module categories over Z/p^n."""
