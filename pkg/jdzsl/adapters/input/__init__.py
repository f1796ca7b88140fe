"""
Input Adapters

Adapters for handling external inputs:
- Command-line arguments and subcommand routing
"""
