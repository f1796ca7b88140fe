"""
Adapters Layer - Clean Architecture

This layer contains adapters that translate between the application layer
and the command line.
"""
