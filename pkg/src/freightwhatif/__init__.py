"""What-if scenario engine for multivariate freight-rate forecasting."""

__version__ = "0.1.0"
