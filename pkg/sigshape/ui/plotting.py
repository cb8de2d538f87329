# SVG scatter plots of MDS embeddings
import io
import logging
from typing import Optional, Sequence

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger('SigShape.plotting')

# fixed salt keeps element ids stable between runs
plt.rcParams['svg.hashsalt'] = 'sigshape'
plt.rcParams['figure.dpi'] = 100
plt.rcParams['font.size'] = 10


def scatter_svg(coords: np.ndarray, labels: Optional[Sequence] = None, title: str = '') -> str:
    """
    Renders the first two embedding axes as an SVG document.

    Args:
        coords: (n, dim) coordinates; a single axis is drawn on a flat line
        labels: Optional per-point labels, one color and legend entry each
        title (str): Plot title

    Returns:
        str: SVG text without a creation date
    """
    coords = np.asarray(coords, dtype=float)
    xs = coords[:, 0]
    ys = coords[:, 1] if coords.shape[1] > 1 else np.zeros_like(xs)

    fig, ax = plt.subplots(figsize=(6, 5))
    try:
        if labels is None:
            ax.scatter(xs, ys, s=24)
        else:
            labels = [str(label) for label in labels]
            classes = list(dict.fromkeys(labels))
            cmap = plt.get_cmap('tab10')
            for idx, name in enumerate(classes):
                mask = np.array([label == name for label in labels])
                ax.scatter(xs[mask], ys[mask], s=24, color=cmap(idx % 10), label=name)
            ax.legend(loc='best', frameon=False)
        ax.set_xlabel('MDS 1')
        ax.set_ylabel('MDS 2')
        if title:
            ax.set_title(title)
        ax.set_aspect('equal', adjustable='datalim')
        fig.tight_layout()

        buffer = io.StringIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})
    finally:
        plt.close(fig)
    logger.info(f"Rendered scatter plot of {len(xs)} points")
    return buffer.getvalue()
