"""Power, natural gas and hydrogen expansion planning with selectable gas-flow models."""

__version__ = "0.1.0"
