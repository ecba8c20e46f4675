#include "glars/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace glars {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;     // relative to trace
constexpr double kRankFloor = 1e-10;  // smallest/largest eigenvalue ratio

struct SymEigen {
    Matrix vectors;     // columns, eigenvalues descending
    Vector values;
};

// Symmetric eigendecomposition, eigenvalues descending, sign convention:
// the largest-magnitude entry of every eigenvector is positive.
SymEigen sym_eigen_desc(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    if (solver.info() != Eigen::Success)
        throw SingularGram("eigendecomposition failed to converge");
    const int q = static_cast<int>(s.rows());
    SymEigen out;
    out.vectors.resize(q, q);
    out.values.resize(q);
    for (int j = 0; j < q; ++j) {
        // Eigen sorts ascending; reverse. Equal eigenvalues keep their
        // relative order, which is deterministic for identical input bits.
        const int src = q - 1 - j;
        Vector v = solver.eigenvectors().col(src);
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < q; ++i) {
            const double a = std::abs(v[i]);
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (v[arg] < 0.0) v = -v;
        out.vectors.col(j) = v;
        out.values[j] = solver.eigenvalues()[src];
    }
    return out;
}

Matrix solve_spd(const Matrix& a, const Matrix& rhs) {
    // a is symmetric positive definite on the paths that reach here; LDLT is
    // enough and keeps results deterministic.
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        throw SingularGram("failed to factor shifted gram matrix");
    return ldlt.solve(rhs);
}

int resolve_component_count(const Vector& eigenvalues_desc, const HRule& rule) {
    const int q = static_cast<int>(eigenvalues_desc.size());
    if (rule.explicit_h) {
        const int h = *rule.explicit_h;
        if (h < 1 || h > q)
            throw InvalidComponentCount("explicit h=" + std::to_string(h) +
                                        " outside [1, " + std::to_string(q) + "]");
        return h;
    }
    const double total = eigenvalues_desc.sum();
    if (total <= 0.0) return q;
    double cum = 0.0;
    for (int h = 1; h <= q; ++h) {
        cum += eigenvalues_desc[h - 1];
        if (cum / total >= rule.threshold) return h;
    }
    return q;
}

}  // namespace

GramMatrix::GramMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw DimensionMismatch("gram matrix must be square");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale)
        throw GlarsError("gram matrix is not symmetric within 1e-12");
    entries_ = 0.5 * (entries_ + entries_.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_);
    const double floor = -kPsdTol * std::max(entries_.trace(), 1e-300);
    if (solver.eigenvalues().minCoeff() < floor)
        throw SingularGram("gram matrix is not positive semidefinite");
}

Vector fit_olse(const Matrix& x, const Vector& y) {
    if (x.rows() < 1 || x.cols() < 1) throw DimensionMismatch("empty design matrix");
    if (y.size() != x.rows()) throw DimensionMismatch("y length does not match X rows");
    const Matrix gram = x.transpose() * x;
    const SymEigen eig = sym_eigen_desc(gram);
    const double largest = eig.values[0];
    const double smallest = eig.values[eig.values.size() - 1];
    if (largest <= 0.0 || smallest < kRankFloor * largest)
        throw SingularGram("X'X is numerically singular (p > n or collinear columns)");
    const Vector xty = x.transpose() * y;
    const Vector z = eig.vectors.transpose() * xty;
    return eig.vectors * (z.array() / eig.values.array()).matrix();
}

Matrix full_transform(const EstimatorSpec& spec, const GramMatrix& gram) {
    spec.validate();
    const Matrix& s = gram.entries();
    const int p = gram.dim();
    const Matrix identity = Matrix::Identity(p, p);
    switch (spec.kind) {
        case EstimatorKind::Olse:
            return identity;
        case EstimatorKind::Re:
            return solve_spd(s + spec.k * identity, s);
        case EstimatorKind::Aure: {
            const Matrix inv = solve_spd(s + spec.k * identity, identity);
            return identity - spec.k * spec.k * inv * inv;
        }
        case EstimatorKind::Le:
            return solve_spd(s + identity, s + spec.d * identity);
        case EstimatorKind::Aule: {
            const Matrix inv = solve_spd(s + identity, identity);
            const double c = (1.0 - spec.d) * (1.0 - spec.d);
            return identity - c * inv * inv;
        }
        case EstimatorKind::Pcre:
        case EstimatorKind::Rk:
        case EstimatorKind::Rd: {
            const EigenBasis basis = principal_eigenvectors(gram, spec.h_rule);
            const Matrix proj = basis.columns * basis.columns.transpose();
            if (spec.kind == EstimatorKind::Pcre) return proj;
            if (spec.kind == EstimatorKind::Rk)
                return proj * solve_spd(s + spec.k * identity, s);
            return proj * solve_spd(s + identity, s + spec.d * identity);
        }
    }
    throw GlarsError("unreachable estimator kind");
}

Vector fit_biased(const Matrix& x, const Vector& y, const EstimatorSpec& spec) {
    const Vector olse = fit_olse(x, y);
    const GramMatrix gram(x.transpose() * x);
    return full_transform(spec, gram) * olse;
}

EigenBasis principal_eigenvectors(const GramMatrix& gram, const HRule& rule) {
    SymEigen eig = sym_eigen_desc(gram.entries());
    // round-off clamp; GramMatrix construction already rejected real violations
    for (int i = 0; i < eig.values.size(); ++i)
        if (eig.values[i] < 0.0) eig.values[i] = 0.0;
    const int h = resolve_component_count(eig.values, rule);
    EigenBasis basis;
    basis.columns = eig.vectors.leftCols(h);
    basis.eigenvalues = eig.values.head(h);
    return basis;
}

Matrix restricted_transform_core(const EstimatorSpec& spec, const Matrix& gram_active) {
    spec.validate();
    const int q = static_cast<int>(gram_active.rows());
    const Matrix identity = Matrix::Identity(q, q);
    switch (spec.kind) {
        case EstimatorKind::Olse:
            return identity;
        case EstimatorKind::Re:
            return solve_spd(gram_active + spec.k * identity, gram_active);
        case EstimatorKind::Aure: {
            const Matrix inv = solve_spd(gram_active + spec.k * identity, identity);
            return identity - spec.k * spec.k * inv * inv;
        }
        case EstimatorKind::Le:
            return solve_spd(gram_active + identity, gram_active + spec.d * identity);
        case EstimatorKind::Aule: {
            const Matrix inv = solve_spd(gram_active + identity, identity);
            const double c = (1.0 - spec.d) * (1.0 - spec.d);
            return identity - c * inv * inv;
        }
        case EstimatorKind::Pcre:
        case EstimatorKind::Rk:
        case EstimatorKind::Rd: {
            const EigenBasis basis =
                principal_eigenvectors(GramMatrix(gram_active), spec.h_rule);
            const Matrix proj = basis.columns * basis.columns.transpose();
            if (spec.kind == EstimatorKind::Pcre) return proj;
            if (spec.kind == EstimatorKind::Rk)
                return proj * solve_spd(gram_active + spec.k * identity, gram_active);
            return proj *
                   solve_spd(gram_active + identity, gram_active + spec.d * identity);
        }
    }
    throw GlarsError("unreachable estimator kind");
}

Matrix restricted_transform(const EstimatorSpec& spec, const std::vector<int>& active,
                            const Matrix& gram_full) {
    const int p = static_cast<int>(gram_full.rows());
    const int q = static_cast<int>(active.size());
    if (q < 1) throw DimensionMismatch("active set is empty");
    Matrix gram_active(q, q);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) gram_active(a, b) = gram_full(active[a], active[b]);
    const Matrix core = restricted_transform_core(spec, gram_active);
    Matrix g = Matrix::Zero(p, q);
    for (int a = 0; a < q; ++a) g.row(active[a]) = core.row(a);
    return g;
}

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Olse: return "adpLARS-LASSO";
        case EstimatorKind::Re: return "adpLARS-EN";
        case EstimatorKind::Aure: return "adpLARS-AURE";
        case EstimatorKind::Le: return "adpLARS-LE";
        case EstimatorKind::Aule: return "adpLARS-AULE";
        case EstimatorKind::Pcre: return "adpLARS-PCRE";
        case EstimatorKind::Rk: return "adpLARS-rk";
        case EstimatorKind::Rd: return "adpLARS-rd";
    }
    return "?";
}

std::optional<EstimatorKind> estimator_from_name(const std::string& name) {
    static const std::pair<const char*, EstimatorKind> table[] = {
        {"adpLARS-LASSO", EstimatorKind::Olse}, {"adpLARS-EN", EstimatorKind::Re},
        {"adpLARS-AURE", EstimatorKind::Aure},  {"adpLARS-LE", EstimatorKind::Le},
        {"adpLARS-AULE", EstimatorKind::Aule},  {"adpLARS-PCRE", EstimatorKind::Pcre},
        {"adpLARS-rk", EstimatorKind::Rk},      {"adpLARS-rd", EstimatorKind::Rd},
    };
    for (const auto& [n, k] : table)
        if (name == n) return k;
    return std::nullopt;
}

}  // namespace glars
