"""Command line, benchmark runner and benchmark generators."""
