"""
Dataset application: images, boxes, manifests and object crops.
"""
