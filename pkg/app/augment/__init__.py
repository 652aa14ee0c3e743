"""
Augment application: baseline pipeline and information-dropping augmentations.
"""
