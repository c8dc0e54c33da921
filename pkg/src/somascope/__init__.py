"""somascope: streaming corpus analytics for body-part mentions."""

__version__ = "0.1.0"
