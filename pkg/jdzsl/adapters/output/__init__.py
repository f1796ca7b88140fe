"""
Output Adapters

Adapters for handling external outputs:
- Result tables and key=value reports
"""
