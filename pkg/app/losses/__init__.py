"""
Losses application: region-weighted reconstruction loss and loss aggregation.
"""
