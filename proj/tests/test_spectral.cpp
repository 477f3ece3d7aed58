#include "heatlab/errors.hpp"
#include "heatlab/random.hpp"
#include "heatlab/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace heatlab;

namespace {

SymMatrix random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
    SymMatrix a(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) a.set(i, j, uniform_in(rng, -scale, scale));
    }
    return a;
}

SymMatrix random_psd(std::mt19937_64& rng, int n) {
    std::vector<double> b(static_cast<std::size_t>(n * n));
    for (double& v : b) v = uniform_in(rng, -1.0, 1.0);
    SymMatrix p(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += b[static_cast<std::size_t>(i * n + l)] * b[static_cast<std::size_t>(j * n + l)];
            p.set(i, j, s);
        }
    }
    return p;
}

}  // namespace

TEST(EigenSym, DiagonalIsSorted) {
    const double d[] = {3.0, 1.0, 2.0};
    const Eigenvalues ev = eigen_sym(SymMatrix::diagonal(d));
    ASSERT_EQ(ev.n, 3);
    EXPECT_EQ(ev[0], 1.0);
    EXPECT_EQ(ev[1], 2.0);
    EXPECT_EQ(ev[2], 3.0);
}

TEST(EigenSym, Identity) {
    const Eigenvalues ev = eigen_sym(SymMatrix::identity(4));
    for (double v : ev.view()) EXPECT_EQ(v, 1.0);
}

TEST(EigenSym, TwoByTwoMatchesQuadraticRoots) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = uniform_in(rng, -1, 1), b = uniform_in(rng, -1, 1), c = uniform_in(rng, -1, 1);
        SymMatrix m(2);
        m.set(0, 0, a);
        m.set(0, 1, b);
        m.set(1, 1, c);
        // roots of l^2 - (a + c) l + (a c - b^2)
        const double tr = a + c, det = a * c - b * b;
        const double disc = std::sqrt(tr * tr - 4.0 * det);
        const double hi = 0.5 * (tr + disc);
        const double lo = 0.5 * (tr - disc);
        const Eigenvalues ev = eigen_sym(m);
        EXPECT_NEAR(ev[0], lo, 1e-12);
        EXPECT_NEAR(ev[1], hi, 1e-12);
    }
}

TEST(EigenSym, ThreeByThreeRootsOfCharacteristicPolynomial) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const SymMatrix a = random_sym(rng, 3);
        // det(A - l I) expanded by hand
        auto charpoly = [&](double l) {
            const double a00 = a(0, 0) - l, a11 = a(1, 1) - l, a22 = a(2, 2) - l;
            return a00 * (a11 * a22 - a(1, 2) * a(1, 2)) - a(0, 1) * (a(0, 1) * a22 - a(1, 2) * a(0, 2)) +
                   a(0, 2) * (a(0, 1) * a(1, 2) - a11 * a(0, 2));
        };
        const Eigenvalues ev = eigen_sym(a);
        for (double l : ev.view()) EXPECT_NEAR(charpoly(l), 0.0, 1e-12);
        EXPECT_NEAR(ev[0] * ev[1] * ev[2], charpoly(0.0), 1e-12);
    }
}

TEST(EigenSym, ReconstructionAndTrace) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + trial % 7;
        const SymMatrix a = random_sym(rng, n, 5.0);
        const EigenDecomposition d = eigen_decompose(a);
        const double err = (d.reconstruct() - a).frobenius_norm();
        EXPECT_LE(err, 1e-10 * (1.0 + a.frobenius_norm()));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += d.eigenvalues[i];
            if (i > 0) {
                EXPECT_LE(d.eigenvalues[i - 1], d.eigenvalues[i]);
            }
        }
        EXPECT_NEAR(sum, a.trace(), 1e-10 * (1.0 + a.frobenius_norm()));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += d.vector_entry(r, i) * d.vector_entry(r, j);
                EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
            }
        }
    }
}

TEST(EigenSym, RejectsNonFinite) {
    SymMatrix a = SymMatrix::identity(3);
    a.set(0, 2, std::numeric_limits<double>::quiet_NaN());
    EXPECT_THROW(eigen_sym(a), NonFinite);
    a.set(0, 2, std::numeric_limits<double>::infinity());
    EXPECT_THROW(truncated_laplacian(a, 1, Sign::plus), NonFinite);
}

TEST(SymMatrix, RowMajorIsSymmetrized) {
    const double e[] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const SymMatrix a = SymMatrix::from_row_major(3, e);
    EXPECT_EQ(a(0, 1), a(1, 0));
    EXPECT_EQ(a(0, 1), 3.0);
    EXPECT_EQ(a(0, 2), 5.0);
    EXPECT_EQ(a(1, 2), 7.0);
    EXPECT_THROW(SymMatrix(9), ParamError);
}

TEST(TruncatedLaplacian, DiagonalExample) {
    const double d[] = {-1.0, 0.0, 2.0};
    const SymMatrix a = SymMatrix::diagonal(d);
    EXPECT_EQ(truncated_laplacian(a, {3, 2, Sign::minus, std::nullopt}), -1.0);
    EXPECT_EQ(truncated_laplacian(a, {3, 2, Sign::plus, std::nullopt}), 2.0);
}

TEST(TruncatedLaplacian, IdentityGivesK) {
    for (int n = 2; n <= 8; ++n) {
        for (int k = 1; k <= n; ++k) {
            EXPECT_DOUBLE_EQ(truncated_laplacian(SymMatrix::identity(n), k, Sign::minus), k);
            EXPECT_DOUBLE_EQ(truncated_laplacian(SymMatrix::identity(n), k, Sign::plus), k);
        }
    }
}

TEST(TruncatedLaplacian, FullIndexIsTrace) {
    std::mt19937_64 rng(8);
    for (int n = 2; n <= 6; ++n) {
        const SymMatrix a = random_sym(rng, n);
        EXPECT_EQ(truncated_laplacian(a, n, Sign::minus), a.trace());
        EXPECT_EQ(truncated_laplacian(a, n, Sign::plus), a.trace());
    }
}

TEST(TruncatedLaplacian, ShiftByFixedConstant) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + trial % 5;
        const int k = 1 + trial % n;
        const SymMatrix a = random_sym(rng, n);
        for (Sign s : {Sign::minus, Sign::plus}) {
            EXPECT_NEAR(truncated_laplacian(a.plus_identity(0.7), k, s) - truncated_laplacian(a, k, s), k * 0.7, 1e-10);
        }
    }
}

TEST(TruncatedLaplacian, PsdMonotonicityAndOrdering) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + trial % 5;
        const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        const SymMatrix a = random_sym(rng, n);
        const SymMatrix p = random_psd(rng, n) * uniform_in(rng, 0.0, 1.0);
        for (Sign s : {Sign::minus, Sign::plus}) {
            EXPECT_GE(truncated_laplacian(a + p, k, s), truncated_laplacian(a, k, s) - 1e-10);
        }
        const double mid = static_cast<double>(k) / n * a.trace();
        EXPECT_LE(truncated_laplacian(a, k, Sign::minus), mid + 1e-12);
        EXPECT_GE(truncated_laplacian(a, k, Sign::plus), mid - 1e-12);
    }
}

TEST(TruncatedLaplacian, SignsAreMirrored) {
    // F_k^-(A) = -F_k^+(-A)
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const SymMatrix a = random_sym(rng, 4);
        EXPECT_NEAR(truncated_laplacian(a, 2, Sign::minus), -truncated_laplacian(a * -1.0, 2, Sign::plus), 1e-13);
    }
}

TEST(TruncatedLaplacian, DimensionMismatch) {
    EXPECT_THROW(truncated_laplacian(SymMatrix::identity(3), {2, 1, Sign::minus, std::nullopt}), ParamError);
    EXPECT_THROW(truncated_laplacian(SymMatrix::identity(3), 4, Sign::minus), ParamError);
}

TEST(ProblemSpec, Validation) {
    EXPECT_NO_THROW((ProblemSpec{2, 2, Sign::plus, std::nullopt}.validate()));
    try {
        ProblemSpec{2, 3, Sign::minus, std::nullopt}.validate();
        FAIL() << "k > N accepted";
    } catch (const ParamError& e) {
        EXPECT_NE(std::string(e.what()).find("k <= N"), std::string::npos);
    }
    EXPECT_THROW((ProblemSpec{1, 1, Sign::minus, std::nullopt}.validate()), ParamError);
    EXPECT_THROW((ProblemSpec{2, 0, Sign::minus, std::nullopt}.validate()), ParamError);
    EXPECT_THROW((ProblemSpec{2, 1, Sign::minus, -0.5}.validate()), ParamError);
}

TEST(ProblemSpec, SignNames) {
    EXPECT_EQ(parse_sign("minus"), Sign::minus);
    EXPECT_EQ(parse_sign(to_string(Sign::plus)), Sign::plus);
    EXPECT_THROW(parse_sign("both"), ParamError);
}
