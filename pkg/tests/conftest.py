import numpy as np

from gbpl import nnet


def total_loss(arch, params, adapter, rows=None):
    x = adapter.x if rows is None else adapter.x[rows]
    out = nnet.forward(arch, params, x)
    return float(adapter.values(out, rows).sum())


def analytic_grad(arch, params, adapter, rows=None):
    x = adapter.x if rows is None else adapter.x[rows]
    out = nnet.forward(arch, params, x)
    return nnet.backward(arch, params, x, adapter.output_grad(out, rows))


def finite_diff_grad(fn, params, coords, h=1e-5):
    """Central finite differences of a scalar function at selected coordinates."""
    g = np.empty(len(coords))
    w = params.copy()
    for i, j in enumerate(coords):
        w[j] = params[j] + h
        up = fn(w)
        w[j] = params[j] - h
        down = fn(w)
        w[j] = params[j]
        g[i] = (up - down) / (2.0 * h)
    return g


def max_rel_error(a, b, floor=1e-6):
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale))


def min_abs_hidden_preactivation(arch, params, x):
    """Smallest |pre-activation| over the hidden ReLU layers for a batch."""
    layers = nnet.unflatten(arch, params)
    h = np.asarray(x, dtype=np.float64)
    smallest = np.inf
    for w, b in layers[:-1]:
        z = h @ w + b
        smallest = min(smallest, float(np.abs(z).min()))
        h = np.maximum(z, 0.0)
    return smallest


def check_gradient(arch, adapter, rng, n_coords=50, h=1e-5, tol=1e-5):
    """Compare the analytic gradient of the summed adapter loss against
    central finite differences on randomly sampled coordinates.

    Configurations with a hidden pre-activation within the FD step of a ReLU
    kink are redrawn: central differences straddle the kink there and are
    biased for any implementation, while the analytic subgradient is exact
    almost everywhere.
    """
    params = nnet.init_params(arch, rng) + 0.05 * rng.standard_normal(arch.param_count)
    for _ in range(50):
        if min_abs_hidden_preactivation(arch, params, adapter.x) > 100.0 * h:
            break
        params += 0.01 * rng.standard_normal(arch.param_count)
    coords = rng.choice(arch.param_count, size=min(n_coords, arch.param_count), replace=False)
    exact = analytic_grad(arch, params, adapter)[coords]
    approx = finite_diff_grad(lambda w: total_loss(arch, w, adapter), params, coords, h)
    # central differences carry ~eps * |loss| / h of cancellation error, so
    # coordinates with gradients below that scale cannot be compared in
    # relative terms; the floor absorbs exactly that float64 limit
    floor = max(1e-6, 1e-6 * abs(total_loss(arch, params, adapter)))
    err = max_rel_error(exact, approx, floor=floor)
    assert err < tol, f"gradient mismatch: max relative error {err:.3e}"
    return err
