#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace heatlab {

inline constexpr int kMaxMatrixDim = 8;

/// Dense symmetric n x n matrix, 1 <= n <= 8, stored as a packed upper triangle.
///
/// Symmetry holds by construction: there is a single storage slot per
/// unordered pair (i, j), and `from_row_major` averages the two halves.
class SymMatrix {
public:
    explicit SymMatrix(int n);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> d);
    /// Builds from a full row-major array of n*n entries, symmetrizing (A + A^T)/2.
    static SymMatrix from_row_major(int n, std::span<const double> entries);

    int size() const noexcept { return n_; }

    double operator()(int i, int j) const noexcept { return a_[slot(i, j)]; }
    void set(int i, int j, double v) noexcept { a_[slot(i, j)] = v; }

    double trace() const noexcept;
    double frobenius_norm() const noexcept;
    bool all_finite() const noexcept;

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix operator+(const SymMatrix& other) const;
    SymMatrix operator-(const SymMatrix& other) const;
    SymMatrix operator*(double s) const;
    SymMatrix plus_identity(double c) const;

private:
    static constexpr int slot(int i, int j) noexcept {
        if (i > j) {
            int tmp = i;
            i = j;
            j = tmp;
        }
        // row-major packed upper triangle of an 8 x 8 layout
        return i * kMaxMatrixDim - i * (i - 1) / 2 + (j - i);
    }

    int n_;
    std::array<double, kMaxMatrixDim * (kMaxMatrixDim + 1) / 2> a_{};
};

/// Ascending eigenvalues of a symmetric matrix.
struct Eigenvalues {
    int n = 0;
    std::array<double, kMaxMatrixDim> values{};

    std::span<const double> view() const noexcept { return {values.data(), static_cast<std::size_t>(n)}; }
    double operator[](int i) const noexcept { return values[static_cast<std::size_t>(i)]; }
};

struct EigenDecomposition {
    Eigenvalues eigenvalues;
    /// Orthonormal eigenvectors stored column-wise: vectors[row * 8 + col].
    std::array<double, kMaxMatrixDim * kMaxMatrixDim> vectors{};

    double vector_entry(int row, int col) const noexcept { return vectors[static_cast<std::size_t>(row * kMaxMatrixDim + col)]; }
    /// Q diag(lambda) Q^T.
    SymMatrix reconstruct() const;
};

/// Cyclic Jacobi eigenvalues, sorted ascending. Throws NonFinite on NaN/Inf input.
Eigenvalues eigen_sym(const SymMatrix& a);
EigenDecomposition eigen_decompose(const SymMatrix& a);

enum class Sign { minus, plus };

std::string to_string(Sign s);
Sign parse_sign(const std::string& s);

/// Dimension, truncation index, operator sign and optional reaction exponent of
///   du/dt = P_k^{sign}(D^2 u) [+ u^{1+p}].
struct ProblemSpec {
    int N = 2;
    int k = 1;
    Sign sign = Sign::minus;
    std::optional<double> reaction_p;

    /// Throws ParamError naming the violated invariant.
    void validate() const;
    bool has_reaction() const noexcept { return reaction_p.has_value(); }
    bool is_laplacian() const noexcept { return k == N; }
    ProblemSpec with_sign(Sign s) const { ProblemSpec c = *this; c.sign = s; return c; }
    ProblemSpec without_reaction() const { ProblemSpec c = *this; c.reaction_p.reset(); return c; }
    ProblemSpec with_reaction(double p) const { ProblemSpec c = *this; c.reaction_p = p; return c; }
};

/// F_k^-(A) = sum of the k smallest eigenvalues, F_k^+(A) = sum of the k largest.
/// k == n short-circuits to trace(A).
double truncated_laplacian(const SymMatrix& a, int k, Sign sign);
double truncated_laplacian(const SymMatrix& a, const ProblemSpec& spec);

}  // namespace heatlab
