"""
Evaluation application: head-map decoding and detection metrics.
"""
