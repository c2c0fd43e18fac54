"""Pure-python (numpy/scipy) distance kernels.

Drop-in fallback for the compiled module: same signatures, same fixed
points.  grid_dijkstra delegates to scipy's compiled graph search after
materializing the edge list; cc_distance runs vectorized value-iteration
sweeps until the field stops changing.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

BACKEND = "python"


def _offset_slices(shape, off):
    src, dst = [], []
    for n, o in zip(shape, off):
        o = int(o)
        if o >= 0:
            src.append(slice(0, n - o))
            dst.append(slice(o, n))
        else:
            src.append(slice(-o, n))
            dst.append(slice(0, n + o))
    return tuple(src), tuple(dst)


def grid_dijkstra(shape, offsets, weights, source):
    """Shortest distances from `source` on the grid graph.

    weights[k, i] is the cost of the undirected edge between node i and node
    i + offsets[k] (C-order flattening); non-finite entries mean no edge.
    """
    shape = tuple(int(n) for n in shape)
    nodes = int(np.prod(shape))
    idx = np.arange(nodes, dtype=np.int64).reshape(shape)
    rows, cols, data = [], [], []
    for k in range(offsets.shape[0]):
        src, dst = _offset_slices(shape, offsets[k])
        a = idx[src].ravel()
        b = idx[dst].ravel()
        w = weights[k].reshape(shape)[src].ravel()
        good = np.isfinite(w)
        rows.append(a[good])
        cols.append(b[good])
        data.append(w[good])
    graph = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nodes, nodes),
    ).tocsr()
    dist = _csgraph_dijkstra(graph, directed=False, indices=int(source))
    return np.asarray(dist, dtype=np.float64)


def cc_distance(
    hshape,
    zshape,
    hspacing,
    horigin,
    zspacing,
    zorigin,
    hoff,
    cost,
    twist,
    vcost,
    source,
    max_sweeps=100000,
):
    """Horizontal-path distance field by monotone value iteration.

    Nodes form a grid over horizontal axes plus (optionally) one central
    axis; a move along direction k steps the horizontal index by hoff[k] and
    shifts the central coordinate by sum_a twist[k, a] * x_a evaluated at the
    starting point.  Off-grid central landings interpolate linearly between
    the two neighbouring levels; when only one is available the candidate is
    penalized by the vertical correction gauge vcost * sqrt(|dz|), a valid
    upper bound realized by a small horizontal loop.
    """
    hshape = tuple(int(n) for n in hshape)
    dh = len(hshape)
    has_z = int(zshape) > 0
    nz = int(zshape) if has_z else 1
    full_shape = hshape + ((nz,) if has_z else ())
    nodes = int(np.prod(full_shape))

    d = np.full(full_shape, np.inf)
    d.ravel()[int(source)] = 0.0

    axes = [
        horigin[a] + hspacing[a] * np.arange(hshape[a], dtype=np.float64)
        for a in range(dh)
    ]
    hgrid = np.meshgrid(*axes, indexing="ij") if dh > 1 else [axes[0]]

    K = hoff.shape[0]
    plans = []
    for k in range(K):
        src, dst = _offset_slices(hshape, hoff[k])
        if any(s.stop is not None and s.start >= s.stop for s in src):
            continue
        plan = {"src": src, "dst": dst, "cost": float(cost[k])}
        if has_z:
            tshift = np.zeros_like(hgrid[0][src])
            for a in range(dh):
                tshift = tshift + twist[k, a] * hgrid[a][src]
            tshift = tshift / zspacing
            base = np.floor(tshift).astype(np.int64)
            frac = tshift - base
            plan["base"] = base[..., None]
            plan["frac"] = frac[..., None]
        plans.append(plan)

    zidx = np.arange(nz, dtype=np.int64) if has_z else None
    sweeps = 0
    with np.errstate(invalid="ignore"):  # inf * 0 in masked lerp lanes
        while sweeps < max_sweeps:
            sweeps += 1
            dnew = d.copy()
            for plan in plans:
                src, dst, step_cost = plan["src"], plan["dst"], plan["cost"]
                if not has_z:
                    cand = step_cost + d[dst]
                    np.minimum(dnew[src], cand, out=dnew[src])
                    continue
                lo = zidx[None, :] if dh == 1 else zidx[(None,) * dh]
                lo = lo + plan["base"]
                frac = plan["frac"]
                lo_ok = (lo >= 0) & (lo < nz)
                hi_ok = (lo + 1 >= 0) & (lo + 1 < nz)
                target = d[dst]
                v_lo = np.take_along_axis(target, np.clip(lo, 0, nz - 1), axis=-1)
                v_hi = np.take_along_axis(target, np.clip(lo + 1, 0, nz - 1), axis=-1)
                lo_fin = lo_ok & np.isfinite(v_lo)
                hi_fin = hi_ok & np.isfinite(v_hi)
                both = lo_fin & hi_fin
                cand = np.full(v_lo.shape, np.inf)
                lerp = (1.0 - frac) * v_lo + frac * v_hi
                np.copyto(cand, lerp, where=both)
                pen_lo = v_lo + vcost * np.sqrt(frac * zspacing)
                pen_hi = v_hi + vcost * np.sqrt((1.0 - frac) * zspacing)
                np.copyto(cand, pen_lo, where=lo_fin & ~both)
                np.copyto(cand, pen_hi, where=hi_fin & ~both)
                cand += step_cost
                np.minimum(dnew[src], cand, out=dnew[src])
            if np.array_equal(dnew, d, equal_nan=True):
                break
            d = dnew
    return d.reshape(nodes)
