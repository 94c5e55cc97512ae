"""reekit: the small Ree groups, their unital, and product-replacement machinery."""

__version__ = "0.1.0"
