"""Incremental bounded model checking and k-induction for a small reactive language."""
