"""
Reference kernels: blur-pooled downsampling, the multi-scale fusion block and the backbone layout.
"""
