"""Reference interpreter for IEC 61131-3 Structured Text with a
mutation-based differential-testing harness."""

__version__ = "0.1.0"
