"""GTE-LM: Levenberg-Marquardt solver and tensor-class checkers for generalized tensor equations."""

__version__ = "0.1.0"
