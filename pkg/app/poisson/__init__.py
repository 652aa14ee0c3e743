"""
Poisson application: gradient-domain seamless cloning.
"""
