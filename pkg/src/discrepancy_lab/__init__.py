"""Exact discrepancy analysis of digit-scrambled van der Corput sets."""
