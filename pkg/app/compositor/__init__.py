"""
Compositor application: object sets, placement and clone-image synthesis.
"""
