#include "heatlab/spectral.hpp"

#include "heatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heatlab {

namespace {

void check_dim(int n) {
    if (n < 1 || n > kMaxMatrixDim) {
        throw ParamError("SymMatrix: dimension must lie in [1, 8], got " + std::to_string(n));
    }
}

constexpr int kMaxSweeps = 64;
constexpr double kRelativeOffTolerance = 1e-12;

// Full dense working copy for the Jacobi sweeps.
struct Dense {
    int n;
    double a[kMaxMatrixDim][kMaxMatrixDim];
};

double off_diagonal_sq(const Dense& d) {
    double s = 0.0;
    for (int p = 0; p < d.n; ++p) {
        for (int q = p + 1; q < d.n; ++q) {
            s += d.a[p][q] * d.a[p][q];
        }
    }
    return s;
}

// Cyclic Jacobi. When `v` is non-null it accumulates the rotations (columns are eigenvectors).
void jacobi(Dense& d, double (*v)[kMaxMatrixDim]) {
    const int n = d.n;
    double frob_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) frob_sq += d.a[i][j] * d.a[i][j];
    }
    const double threshold_sq = kRelativeOffTolerance * kRelativeOffTolerance * frob_sq;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal_sq(d);
        if (off <= threshold_sq || off == 0.0) return;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = d.a[p][q];
                if (apq == 0.0) continue;
                const double theta = (d.a[q][q] - d.a[p][p]) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                d.a[p][p] -= t * apq;
                d.a[q][q] += t * apq;
                d.a[p][q] = d.a[q][p] = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = d.a[r][p];
                    const double arq = d.a[r][q];
                    d.a[r][p] = d.a[p][r] = c * arp - s * arq;
                    d.a[r][q] = d.a[q][r] = s * arp + c * arq;
                }
                if (v != nullptr) {
                    for (int r = 0; r < n; ++r) {
                        const double vrp = v[r][p];
                        const double vrq = v[r][q];
                        v[r][p] = c * vrp - s * vrq;
                        v[r][q] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
}

Dense to_dense(const SymMatrix& a) {
    if (!a.all_finite()) {
        throw NonFinite("eigen_sym: matrix has a NaN or infinite entry");
    }
    Dense d{};
    d.n = a.size();
    for (int i = 0; i < d.n; ++i) {
        for (int j = 0; j < d.n; ++j) d.a[i][j] = a(i, j);
    }
    return d;
}

}  // namespace

SymMatrix::SymMatrix(int n) : n_(n) { check_dim(n); }

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
    return m;
}

SymMatrix SymMatrix::from_row_major(int n, std::span<const double> entries) {
    SymMatrix m(n);
    if (entries.size() != static_cast<std::size_t>(n * n)) {
        throw ParamError("SymMatrix::from_row_major: expected n*n entries");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double aij = entries[static_cast<std::size_t>(i * n + j)];
            const double aji = entries[static_cast<std::size_t>(j * n + i)];
            m.set(i, j, 0.5 * (aij + aji));
        }
    }
    return m;
}

double SymMatrix::trace() const noexcept {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    }
    return std::sqrt(s);
}

bool SymMatrix::all_finite() const noexcept {
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            if (!std::isfinite((*this)(i, j))) return false;
        }
    }
    return true;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    if (other.n_ != n_) throw ParamError("SymMatrix: dimension mismatch");
    for (std::size_t s = 0; s < a_.size(); ++s) a_[s] += other.a_[s];
    return *this;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
    SymMatrix r = *this;
    r += other;
    return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
    return *this + other * -1.0;
}

SymMatrix SymMatrix::operator*(double s) const {
    SymMatrix r = *this;
    for (double& x : r.a_) x *= s;
    return r;
}

SymMatrix SymMatrix::plus_identity(double c) const {
    SymMatrix r = *this;
    for (int i = 0; i < n_; ++i) r.set(i, i, r(i, i) + c);
    return r;
}

Eigenvalues eigen_sym(const SymMatrix& a) {
    Dense d = to_dense(a);
    jacobi(d, nullptr);
    Eigenvalues ev;
    ev.n = d.n;
    for (int i = 0; i < d.n; ++i) ev.values[static_cast<std::size_t>(i)] = d.a[i][i];
    std::sort(ev.values.begin(), ev.values.begin() + d.n);
    return ev;
}

EigenDecomposition eigen_decompose(const SymMatrix& a) {
    Dense d = to_dense(a);
    double v[kMaxMatrixDim][kMaxMatrixDim] = {};
    for (int i = 0; i < d.n; ++i) v[i][i] = 1.0;
    jacobi(d, v);

    std::array<int, kMaxMatrixDim> order{};
    std::iota(order.begin(), order.begin() + d.n, 0);
    std::sort(order.begin(), order.begin() + d.n, [&](int x, int y) { return d.a[x][x] < d.a[y][y]; });

    EigenDecomposition out;
    out.eigenvalues.n = d.n;
    for (int c = 0; c < d.n; ++c) {
        const int src = order[static_cast<std::size_t>(c)];
        out.eigenvalues.values[static_cast<std::size_t>(c)] = d.a[src][src];
        for (int r = 0; r < d.n; ++r) {
            out.vectors[static_cast<std::size_t>(r * kMaxMatrixDim + c)] = v[r][src];
        }
    }
    return out;
}

SymMatrix EigenDecomposition::reconstruct() const {
    const int n = eigenvalues.n;
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int c = 0; c < n; ++c) s += vector_entry(i, c) * eigenvalues[c] * vector_entry(j, c);
            m.set(i, j, s);
        }
    }
    return m;
}

std::string to_string(Sign s) { return s == Sign::minus ? "minus" : "plus"; }

Sign parse_sign(const std::string& s) {
    if (s == "minus" || s == "-") return Sign::minus;
    if (s == "plus" || s == "+") return Sign::plus;
    throw ParamError("unknown operator sign '" + s + "' (expected minus or plus)");
}

void ProblemSpec::validate() const {
    if (N < 2) throw ParamError("ProblemSpec: N must be >= 2, got " + std::to_string(N));
    if (N > kMaxMatrixDim) throw ParamError("ProblemSpec: N must be <= 8, got " + std::to_string(N));
    if (k < 1 || k > N) {
        throw ParamError("ProblemSpec: truncation index must satisfy 1 <= k <= N, got k=" + std::to_string(k) +
                         ", N=" + std::to_string(N));
    }
    if (reaction_p && !(*reaction_p >= 0.0 && std::isfinite(*reaction_p))) {
        throw ParamError("ProblemSpec: reaction exponent p must be a nonnegative finite number");
    }
}

double truncated_laplacian(const SymMatrix& a, int k, Sign sign) {
    const int n = a.size();
    if (k < 1 || k > n) throw ParamError("truncated_laplacian: k out of range");
    if (k == n) {
        if (!a.all_finite()) throw NonFinite("truncated_laplacian: matrix has a NaN or infinite entry");
        return a.trace();
    }
    if (n == 2) {
        // closed form: mean +- half the spread
        if (!a.all_finite()) throw NonFinite("truncated_laplacian: matrix has a NaN or infinite entry");
        const double mean = 0.5 * (a(0, 0) + a(1, 1));
        const double radius = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
        return sign == Sign::minus ? mean - radius : mean + radius;
    }
    const Eigenvalues ev = eigen_sym(a);
    double s = 0.0;
    if (sign == Sign::minus) {
        for (int i = 0; i < k; ++i) s += ev[i];
    } else {
        for (int i = n - k; i < n; ++i) s += ev[i];
    }
    return s;
}

double truncated_laplacian(const SymMatrix& a, const ProblemSpec& spec) {
    if (a.size() != spec.N) {
        throw ParamError("truncated_laplacian: matrix dimension " + std::to_string(a.size()) +
                         " does not match N=" + std::to_string(spec.N));
    }
    return truncated_laplacian(a, spec.k, spec.sign);
}

}  // namespace heatlab
