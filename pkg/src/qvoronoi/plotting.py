"""Static SVG renderings of diagrams on the unit-sphere image (front hemisphere)."""

from __future__ import annotations

import numpy as np

from .voronoi import assign_cells, from_sphere, to_sphere

DEFAULT_VIEW = (0.62, -0.58, 0.53)


def _view_basis(view):
    w = np.asarray(view, dtype=float)
    w = w / np.linalg.norm(w)
    up = np.array([0.0, 0.0, 1.0]) if abs(w[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(up, w)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(w, e1)
    return w, e1, e2


def render_diagram_svg(path, sites, kind, dim, boundary=None, title="", chash=None,
                       view=DEFAULT_VIEW, resolution=220):
    """Orthographic view of the sphere image, cells colored per nearest site.

    For d >= 3 the sphere is the image of the pure-state ellipsoid under the
    affine ellipsoid-to-sphere map, so divergence cells are bounded by great
    circles. Sites behind the sphere are drawn hollow.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap

    w, e1, e2 = _view_basis(view)
    xs = np.linspace(-1.0, 1.0, resolution)
    X, Y = np.meshgrid(xs, xs)
    inside = X**2 + Y**2 < 1.0
    Z = np.sqrt(np.clip(1.0 - X**2 - Y**2, 0.0, None))
    u = X[..., None] * e1 + Y[..., None] * e2 + Z[..., None] * w
    cells = np.full(X.shape, np.nan)
    assign = assign_cells(from_sphere(u[inside], dim), sites, kind, dim)
    cells[inside] = assign.site

    k = len(sites)
    cmap = ListedColormap(plt.get_cmap("tab10" if k <= 10 else "tab20")(np.arange(k) % 20))
    with matplotlib.rc_context({"svg.hashsalt": "qvoronoi", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        ax.imshow(cells, origin="lower", extent=(-1, 1, -1, 1), cmap=cmap, vmin=-0.5, vmax=k - 0.5,
                  interpolation="nearest", alpha=0.75)
        t = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(t), np.sin(t), color="black", lw=0.8)
        if boundary is not None:
            for pl in boundary.polylines:
                front = pl.sphere @ w >= 0
                px, py = pl.sphere @ e1, pl.sphere @ e2
                ax.plot(np.where(front, px, np.nan), np.where(front, py, np.nan), color="black", lw=1.2)
        us = to_sphere(sites, dim)
        us = us / np.linalg.norm(us, axis=1, keepdims=True)
        for i, s in enumerate(us):
            front = s @ w >= 0
            ax.plot(s @ e1, s @ e2, "o", ms=6, mec="black",
                    mfc=cmap(i) if front else "none", mew=1.0)
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        ax.axis("off")
        if title:
            ax.set_title(title, fontsize=9)
        meta = {"Date": None, "Creator": "qvoronoi"}
        if chash:
            meta["Description"] = f"config_hash={chash}"
        fig.savefig(path, format="svg", metadata=meta)
        plt.close(fig)
    return path
