"""Independent reference computations used by the tests.

Nothing here calls into the package's numerical kernels: each oracle takes
a different route (explicit index sums, generalized eigenproblems, ODE
quadrature, closed-form spectra, loop assembly) to the quantity under test.
"""

import itertools

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp

# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------


def green_cauchy_index(phi, g, eta):
    """``G_AB = g_ij phi^i_A phi^j_B`` and ``C_ij = eta_AB inv^A_i inv^B_j`` by index loops."""
    n = phi.shape[0]
    inv = np.linalg.inv(phi)
    G = np.zeros((n, n))
    C = np.zeros((n, n))
    for A, B, i, j in itertools.product(range(n), repeat=4):
        G[A, B] += g[i, j] * phi[i, A] * phi[j, B]
        C[i, j] += eta[A, B] * inv[A, i] * inv[B, j]
    return G, C


def polar_by_eigh(phi):
    """Euclidean polar factors from the eigendecomposition of ``phi^T phi``."""
    w, V = np.linalg.eigh(phi.T @ phi)
    A = V @ np.diag(np.sqrt(w)) @ V.T
    return phi @ np.linalg.inv(A), A


def invariants_by_generalized_eig(phi, g, eta):
    """``q = ln sqrt(lambda)`` with ``lambda`` the eigenvalues of ``G x = lambda eta x``."""
    lam = sla.eigh(phi.T @ g @ phi, eta, eigvals_only=True)
    return 0.5 * np.log(np.sort(lam))


def haar_weight_explicit(q):
    if len(q) == 2:
        return abs(np.sinh(q[1] - q[0]))
    q1, q2, q3 = q
    return abs(np.sinh(q2 - q3) * np.sinh(q3 - q1) * np.sinh(q1 - q2))


def lebesgue_weight_explicit(Q):
    if len(Q) == 2:
        return abs(Q[0] ** 2 - Q[1] ** 2)
    Q1, Q2, Q3 = Q
    return abs((Q1 ** 2 - Q2 ** 2) * (Q2 ** 2 - Q3 ** 2) * (Q3 ** 2 - Q1 ** 2))


# ---------------------------------------------------------------------------
# structure constants of the bracket table
# ---------------------------------------------------------------------------


def bracket_sigma_sigma(Sigma):
    """``{Sigma^i_j, Sigma^k_l} = d^i_l Sigma^k_j - d^k_j Sigma^i_l`` as an ``[i,j,k,l]`` array."""
    d = np.eye(Sigma.shape[0])
    return np.einsum("il,kj->ijkl", d, Sigma) - np.einsum("kj,il->ijkl", d, Sigma)


def bracket_hat_hat(SigmaHat):
    """``{SH^A_B, SH^C_D} = d^C_B SH^A_D - d^A_D SH^C_B``."""
    d = np.eye(SigmaHat.shape[0])
    return np.einsum("CB,AD->ABCD", d, SigmaHat) - np.einsum("AD,CB->ABCD", d, SigmaHat)


def bracket_hat_momentum_plus(p_hat):
    """``{SH^A_B, p^_C} = +d^A_C p^_B``, the plus-sign form of the relation."""
    d = np.eye(p_hat.size)
    return np.einsum("AC,B->ABC", d, p_hat)


def bracket_generator_momentum(p):
    """``{J^i_j, p_k} = {Lambda^i_j, p_k} = d^i_k p_j``."""
    d = np.eye(p.size)
    return np.einsum("ik,j->ijk", d, p)


# ---------------------------------------------------------------------------
# kinetic energies by explicit index sums
# ---------------------------------------------------------------------------


def dalembert_energy_index(m, J, g, v, phidot):
    trans = 0.5 * m * np.einsum("ij,i,j->", g, v, v)
    internal = 0.5 * np.einsum("ij,iA,jB,AB->", g, phidot, phidot, J)
    return trans + internal


def invariant_internal_energy(I, A, B, W, M):
    """``(I/2) W^a_b W^c_d M_ac M^bd + (A/2) W^a_b W^b_a + (B/2) (W^a_a)^2`` by index sums."""
    Mi = np.linalg.inv(M)
    t_metric = np.einsum("ab,cd,ac,bd->", W, W, M, Mi)
    t_aff = np.einsum("ab,ba->", W, W)
    return 0.5 * I * t_metric + 0.5 * A * t_aff + 0.5 * B * np.trace(W) ** 2


# ---------------------------------------------------------------------------
# geodesics by ODE quadrature
# ---------------------------------------------------------------------------


def geodesic_by_quadrature(phi0, OmegaHat, times):
    """Solve ``phidot = phi OmegaHat`` with a high-order adaptive integrator."""
    n = phi0.shape[0]
    sol = solve_ivp(
        lambda t, y: (y.reshape(n, n) @ OmegaHat).ravel(),
        (0.0, float(times[-1])),
        phi0.ravel(),
        method="DOP853",
        t_eval=times,
        rtol=1e-13,
        atol=1e-14,
    )
    return sol.y.T.reshape(-1, n, n)


# ---------------------------------------------------------------------------
# closed-form spectra
# ---------------------------------------------------------------------------


def box_spectrum(c, length, k):
    """``-c f''`` on ``(0, L)`` with Dirichlet ends."""
    return np.array([c * (np.pi * (j + 1) / length) ** 2 for j in range(k)])


def oscillator_spectrum(mass, kappa, k, hbar=1.0):
    omega = np.sqrt(kappa / mass)
    return np.array([hbar * omega * (j + 0.5) for j in range(k)])


def planar_radial_spectrum(I, ell2_over_4, a, c, k, hbar=1.0):
    """``-(hbar^2/2I)(f'' + f'/Q) + (hbar^2 L/(2I Q^2)) + a/Q^2 + c Q^2`` in closed form.

    ``L = ell2_over_4``.  The effective index is ``nu = sqrt(L + 2 I a / hbar^2)``
    and the frequency ``Omega = sqrt(2 c / I)``; levels ``hbar Omega (2k + 1 + nu)``.
    """
    nu = np.sqrt(ell2_over_4 + 2 * I * a / hbar ** 2)
    Omega = np.sqrt(2 * c / I)
    return np.array([hbar * Omega * (2 * j + 1 + nu) for j in range(k)])


def hyperbolic_shear_levels(m, n, alpha=1.0, hbar=1.0):
    """Bound levels of ``-(hbar^2/alpha)(1/sh x)(sh x f')' + V_cfg`` from the Poschl-Teller form.

    With ``f = g / sqrt(sh x)`` and ``y = x/2`` the channel is
    ``(c/4)[-g_yy + l(l+1)/sh^2 y - v(v+1)/ch^2 y] + c/4`` where
    ``l = |n-m|/2 - 1/2`` and ``v = |n+m|/2 - 1/2``.  The hyperbolic
    Poschl-Teller well binds at ``-(v - l - 1 - 2k)^2`` while that
    quantity's base stays positive.
    """
    c = hbar ** 2 / alpha
    ell = abs(n - m) / 2 - 0.5
    nu = abs(n + m) / 2 - 0.5
    out = []
    k = 0
    while nu - ell - 1 - 2 * k > 0:
        out.append(c / 4 - (c / 4) * (nu - ell - 1 - 2 * k) ** 2)
        k += 1
    return np.array(out)


# ---------------------------------------------------------------------------
# three-dimensional scalar channel by loop assembly
# ---------------------------------------------------------------------------


def scalar_operator_3d(axis, weight, c_lap, c_dil, potential):
    """Symmetric matrix of ``-c_lap (1/P) div(P grad) - c_dil (d1+d2+d3)^2 + V``.

    Assembled node by node on the open chamber ``x1 < x2 < x3`` with
    face-centred weights and homogeneous Dirichlet data outside, then
    symmetrized with ``P^{1/2}``.
    """
    N = axis.size
    h = axis[1] - axis[0]
    nodes = [(i, j, k) for i in range(N) for j in range(N) for k in range(N)
             if axis[i] < axis[j] < axis[k]]
    index = {node: r for r, node in enumerate(nodes)}

    def coord(i):
        return axis[0] + i * h

    rows, cols, vals = [], [], []
    for node, r in index.items():
        x = np.array([coord(t) for t in node])
        Pn = weight(x)
        diag = potential(x)
        for a in range(3):
            for step in (+1, -1):
                face = x.copy()
                face[a] += 0.5 * step * h
                wf = weight(face)
                diag += c_lap * wf / (Pn * h * h)
                nb = list(node)
                nb[a] += step
                nb = tuple(nb)
                if nb in index:
                    rows.append(r)
                    cols.append(index[nb])
                    vals.append(-c_lap * wf / (Pn * h * h))
        if c_dil:
            diag += 2 * c_dil / (h * h)
            for step in (+1, -1):
                nb = tuple(t + step for t in node)
                if nb in index:
                    rows.append(r)
                    cols.append(index[nb])
                    vals.append(-c_dil / (h * h))
        rows.append(r)
        cols.append(r)
        vals.append(diag)
    H = sp.csr_matrix((vals, (rows, cols)), shape=(len(nodes),) * 2).toarray()
    root = np.array([np.sqrt(weight(np.array([coord(t) for t in node]))) for node in nodes])
    return (root[:, None] * H) / root[None, :]
