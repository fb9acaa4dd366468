"""Independent reference computations shared by the unit and acceptance tests."""

import math


def naive_hsic(a, b, sa, sb):
    """V-statistic by explicit double loops over pairs, expanded as

    (1/n^2) sum K*L - (2/n^3) sum_i rowK_i rowL_i + (1/n^4) sum K sum L.
    """
    n = len(a)
    kl = 0.0
    rk, rl = [0.0] * n, [0.0] * n
    for i in range(n):
        for j in range(n):
            k = math.exp(-(a[i] - a[j]) ** 2 / (2 * sa * sa))
            ell = math.exp(-(b[i] - b[j]) ** 2 / (2 * sb * sb))
            kl += k * ell
            rk[i] += k
            rl[i] += ell
    cross = sum(x * y for x, y in zip(rk, rl))
    return kl / n ** 2 - 2 * cross / n ** 3 + sum(rk) * sum(rl) / n ** 4


def tsls_bias(gamma, tau, nu, rho, kappa, var_u, var_z):
    """Probability limit of the IV estimate minus beta in the linear model

    Z = gamma U + eZ, X = tau Z + rho U + eX, Y = beta X + nu Z + kappa U + eY,
    i.e. cov(Z, nu Z + kappa U) / cov(Z, X).
    """
    num = gamma * (nu * gamma + kappa) * var_u + nu * var_z
    den = gamma * (tau * gamma + rho) * var_u + tau * var_z
    return num / den
