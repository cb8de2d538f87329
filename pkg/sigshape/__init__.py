"""
SigShape - shape analysis of motion capture animations.
Curves on SO(3)^d compared by SRVT, elastic SRVT and log-signature distances.
"""

__version__ = "1.0.0"
__description__ = "Shape distances, embeddings and classification for motion capture clips"
