"""
Reports application for analytics and reporting.
"""