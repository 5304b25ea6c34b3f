"""Lexical semantic change detection toolkit.

Builds word usage graphs from human judgments, derives graded and binary
change scores from clustered graphs, trains baseline change-detection
systems, and scores predictions against gold data.
"""

__version__ = "0.1.0"
