"""Monte-Carlo goodness-of-fit tests for discrete distributions."""

__version__ = "0.1.0"
