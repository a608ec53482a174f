"""Point-to-set kappa-norms over R^d."""
__version__ = "0.1.0"
