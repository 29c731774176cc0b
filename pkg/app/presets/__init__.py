"""
Packaged experiment presets and example configurations.
"""
