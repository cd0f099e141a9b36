#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pfc/errors.hpp"
#include "pfc/tableau.hpp"

namespace pfc {

/// Dense square matrix, row-major. Stage counts are small (s <= ~10), so
/// nothing here tries to be clever.
struct SquareMat {
    int n = 0;
    std::vector<double> v;

    SquareMat() = default;
    explicit SquareMat(int size) : n(size), v(static_cast<std::size_t>(size) * size, 0.0) {}
    SquareMat(int size, std::vector<double> data) : n(size), v(std::move(data)) {}

    double& at(int i, int j) { return v[static_cast<std::size_t>(i * n + j)]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i * n + j)]; }
};

inline SquareMat mat_identity(int n) {
    SquareMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

inline SquareMat mat_ones(int n) {
    SquareMat m(n);
    std::fill(m.v.begin(), m.v.end(), 1.0);
    return m;
}

/// Lower-triangular all-ones matrix, diagonal included.
inline SquareMat mat_lower_ones(int n) {
    SquareMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m.at(i, j) = 1.0;
    return m;
}

inline SquareMat mat_mul(const SquareMat& a, const SquareMat& b) {
    SquareMat out(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < a.n; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

inline double frobenius_norm(const SquareMat& m) {
    double s = 0.0;
    for (double x : m.v) s += x * x;
    return std::sqrt(s);
}

/// 1/2 (M + M^T); both triangles are written from the same expression, so the
/// result is symmetric bitwise.
inline SquareMat symmetrize(const SquareMat& m) {
    SquareMat out(m.n);
    for (int i = 0; i < m.n; ++i) {
        out.at(i, i) = m.at(i, i);
        for (int j = 0; j < i; ++j) {
            const double x = 0.5 * (m.at(i, j) + m.at(j, i));
            out.at(i, j) = x;
            out.at(j, i) = x;
        }
    }
    return out;
}

inline SquareMat leading_submatrix(const SquareMat& m, int order) {
    SquareMat out(order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) out.at(i, j) = m.at(i, j);
    return out;
}

/// Solve L X = B by forward substitution, L lower triangular.
inline SquareMat forward_solve(const SquareMat& lower, const SquareMat& b) {
    const int n = lower.n;
    SquareMat x(n);
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            double acc = b.at(i, col);
            for (int j = 0; j < i; ++j) acc -= lower.at(i, j) * x.at(j, col);
            const double d = lower.at(i, i);
            if (d == 0.0) throw structural_error("forward_solve: singular lower-triangular matrix");
            x.at(i, col) = acc / d;
        }
    }
    return x;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
/// 30-sweep cap with early exit once the off-diagonal norm drops below
/// 1e-14 * ||M||_F.
inline std::vector<double> eig_symmetric(const SquareMat& m) {
    const int n = m.n;
    const double scale = std::max(1.0, frobenius_norm(m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("eig_symmetric: input is not symmetric");

    SquareMat a = m;
    const double norm = frobenius_norm(m);
    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) s += 2.0 * a.at(i, j) * a.at(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 30 && off_norm() > 1e-14 * norm; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    if (off_norm() > 1e-13 * std::max(norm, 1e-300))
        throw numeric_error("eig_symmetric: Jacobi sweeps did not converge");

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a.at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

/// The four certification matrices:
///   Q  = (Ahat^-1 A - I) E_L + I
///   H0 = Ahat^-1 E_L
///   H1 = beta Q - (lip/2) I
///   H2 = alpha Q - 1/2 E + Ahat^-1 A E_L
struct CertMatrices {
    SquareMat Q, H0, H1, H2;
};

namespace detail {
inline SquareMat mat_from_tableau(const std::vector<double>& flat, int s) { return SquareMat(s, flat); }
} // namespace detail

inline CertMatrices build_certification_matrices(const ImexTableau& tab, double alpha, double beta,
                                                 double lip) {
    const ValidationReport rep = validate_tableau(tab);
    if (!rep.pass) {
        std::string why = "tableau fails validation:";
        for (const auto& chk : rep.checks)
            if (!chk.pass) why += " [" + chk.name + "]";
        throw structural_error(why);
    }

    const int s = tab.s;
    const SquareMat A = detail::mat_from_tableau(tab.A, s);
    const SquareMat Ahat = detail::mat_from_tableau(tab.Ahat, s);
    const SquareMat el = mat_lower_ones(s);
    const SquareMat ahat_inv_a = forward_solve(Ahat, A);
    const SquareMat ahat_inv_el = forward_solve(Ahat, el);

    CertMatrices out;
    out.Q = SquareMat(s);
    {
        SquareMat d = ahat_inv_a;
        for (int i = 0; i < s; ++i) d.at(i, i) -= 1.0;
        out.Q = mat_mul(d, el);
        for (int i = 0; i < s; ++i) out.Q.at(i, i) += 1.0;
    }
    out.H0 = ahat_inv_el;
    out.H1 = SquareMat(s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            out.H1.at(i, j) = beta * out.Q.at(i, j) - (i == j ? 0.5 * lip : 0.0);
    const SquareMat ael = mat_mul(ahat_inv_a, el);
    out.H2 = SquareMat(s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            out.H2.at(i, j) = alpha * out.Q.at(i, j) - 0.5 + ael.at(i, j);
    return out;
}

/// Certification outcome per Theorem-style eigenvalue conditions: lambda_min
/// of the symmetrized Q and H0, minimal admissible stabilizers, and
/// positive-definiteness of every leading principal submatrix.
struct StabilizerCertificate {
    int s = 0;
    double alpha = 0.0, beta = 0.0, lip = 0.0;
    CertMatrices matrices;
    double lambda_min_Qbar = 0.0;
    double lambda_min_H0bar = 0.0;
    double alpha_min = 0.0;
    double beta_min = 0.0;
    std::vector<bool> q_pd, h0_pd, h1_pd, h2_pd; // per leading submatrix order 1..s
    bool admissible = false;
    std::string reason;
};

namespace detail {

inline double pd_threshold(const SquareMat& m) { return 1e-12 * std::max(1.0, frobenius_norm(m)); }

/// Eigenvalues of every leading principal submatrix, cross-checked against
/// the interlacing bounds lambda_k <= mu_k <= lambda_{k+s-m}.
inline std::vector<std::vector<double>> submatrix_spectra_checked(const SquareMat& sym,
                                                                  const char* label) {
    const int s = sym.n;
    std::vector<std::vector<double>> spectra(static_cast<std::size_t>(s));
    const std::vector<double> full = eig_symmetric(sym);
    spectra[static_cast<std::size_t>(s - 1)] = full;
    const double tol = 1e-10 * std::max(1.0, frobenius_norm(sym));
    for (int m = 1; m < s; ++m) {
        const std::vector<double> sub = eig_symmetric(leading_submatrix(sym, m));
        for (int k = 0; k < m; ++k) {
            const double mu = sub[static_cast<std::size_t>(k)];
            if (full[static_cast<std::size_t>(k)] > mu + tol ||
                mu > full[static_cast<std::size_t>(k + s - m)] + tol)
                throw numeric_error(std::string("interlacing cross-check failed for ") + label);
        }
        spectra[static_cast<std::size_t>(m - 1)] = sub;
    }
    return spectra;
}

inline std::vector<bool> pd_flags(const SquareMat& sym, const std::vector<std::vector<double>>& spectra) {
    std::vector<bool> flags;
    for (int m = 1; m <= sym.n; ++m) {
        const SquareMat sub = leading_submatrix(sym, m);
        flags.push_back(spectra[static_cast<std::size_t>(m - 1)].front() > pd_threshold(sub));
    }
    return flags;
}

} // namespace detail

inline StabilizerCertificate certify(const ImexTableau& tab, double alpha, double beta, double lip) {
    if (!(lip >= 0.0) || !std::isfinite(lip))
        throw config_error("certify: Lipschitz constant must be finite and nonnegative");

    StabilizerCertificate cert;
    cert.s = tab.s;
    cert.alpha = alpha;
    cert.beta = beta;
    cert.lip = lip;
    cert.matrices = build_certification_matrices(tab, alpha, beta, lip);

    const SquareMat qbar = symmetrize(cert.matrices.Q);
    const SquareMat h0bar = symmetrize(cert.matrices.H0);
    const SquareMat h1bar = symmetrize(cert.matrices.H1);
    const SquareMat h2bar = symmetrize(cert.matrices.H2);

    const auto q_spectra = detail::submatrix_spectra_checked(qbar, "Qbar");
    const auto h0_spectra = detail::submatrix_spectra_checked(h0bar, "H0bar");
    const auto h1_spectra = detail::submatrix_spectra_checked(h1bar, "H1bar");
    const auto h2_spectra = detail::submatrix_spectra_checked(h2bar, "H2bar");

    cert.lambda_min_Qbar = q_spectra.back().front();
    cert.lambda_min_H0bar = h0_spectra.back().front();
    cert.q_pd = detail::pd_flags(qbar, q_spectra);
    cert.h0_pd = detail::pd_flags(h0bar, h0_spectra);
    cert.h1_pd = detail::pd_flags(h1bar, h1_spectra);
    cert.h2_pd = detail::pd_flags(h2bar, h2_spectra);

    const bool q_ok = cert.lambda_min_Qbar > detail::pd_threshold(qbar);
    const bool h0_ok = cert.lambda_min_H0bar > detail::pd_threshold(h0bar);
    if (!q_ok || !h0_ok) {
        cert.admissible = false;
        cert.reason = !q_ok ? "lambda_min(Qbar) not positive" : "lambda_min(H0bar) not positive";
        return cert;
    }

    cert.alpha_min = 1.0 / (2.0 * cert.lambda_min_Qbar) - 1.0;
    cert.beta_min = lip / (2.0 * cert.lambda_min_Qbar);
    if (alpha < cert.alpha_min) {
        cert.admissible = false;
        cert.reason = "alpha below alpha_min";
        return cert;
    }
    if (beta < cert.beta_min) {
        cert.admissible = false;
        cert.reason = "beta below beta_min";
        return cert;
    }
    cert.admissible = true;

    // Interior of the admissible region: Lemma-3.2 consequence, every leading
    // submatrix of all four matrices positive-definite. Checked, not assumed.
    if (alpha > cert.alpha_min + 1e-9 && beta > cert.beta_min + 1e-9) {
        auto all_true = [](const std::vector<bool>& flags) {
            return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
        };
        if (!(all_true(cert.q_pd) && all_true(cert.h0_pd) && all_true(cert.h1_pd) &&
              all_true(cert.h2_pd)))
            throw numeric_error("certify: admissible stabilizers but a principal submatrix is not PD");
    }
    return cert;
}

} // namespace pfc
