"""Services package for stuq experiments."""
