#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace glars {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// --- error taxonomy ---------------------------------------------------------

struct GlarsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularGram : GlarsError {
    using GlarsError::GlarsError;
};
struct InvalidComponentCount : GlarsError {
    using GlarsError::GlarsError;
};
struct ConstantColumn : GlarsError {
    explicit ConstantColumn(int column)
        : GlarsError("column " + std::to_string(column) + " is constant (sd <= 1e-12)"),
          column(column) {}
    int column;
};
struct TooFewRows : GlarsError {
    using GlarsError::GlarsError;
};
struct ZeroDirection : GlarsError {
    using GlarsError::GlarsError;
};
struct OutOfRange : GlarsError {
    using GlarsError::GlarsError;
};
struct DimensionMismatch : GlarsError {
    using GlarsError::GlarsError;
};
struct EmptyGrid : GlarsError {
    using GlarsError::GlarsError;
};
struct MissingColumn : GlarsError {
    using GlarsError::GlarsError;
};
struct NonNumericCell : GlarsError {
    NonNumericCell(int row, int column, const std::string& what)
        : GlarsError("non-numeric cell at row " + std::to_string(row) + ", column " +
                     std::to_string(column) + ": " + what),
          row(row), column(column) {}
    int row;
    int column;
};
struct EmptyFile : GlarsError {
    using GlarsError::GlarsError;
};
struct IoError : GlarsError {
    using GlarsError::GlarsError;
};
struct CorruptBundle : GlarsError {
    using GlarsError::GlarsError;
};

// --- estimator specification -------------------------------------------------

enum class EstimatorKind { Olse, Re, Aure, Le, Aule, Pcre, Rk, Rd };

/// Component-count rule for the principal-component family: an explicit h, or
/// the smallest h whose cumulative eigenvalue share reaches `threshold`.
struct HRule {
    std::optional<int> explicit_h;
    double threshold = 0.995;

    static HRule count(int h) { return HRule{h, 0.995}; }
    static HRule share(double threshold) { return HRule{std::nullopt, threshold}; }
};

/// Which of the eight transforms, with its shrinkage parameters. Parameters a
/// kind does not use are ignored (d for Re, k for Le, ...).
struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Olse;
    double k = 0.0;       // ridge shrinkage, Re/Aure/Rk
    double d = 1.0;       // Liu shrinkage in [0,1], Le/Aule/Rd
    HRule h_rule{};       // component count, Pcre/Rk/Rd

    void validate() const {
        if (k < 0.0) throw GlarsError("ridge parameter k must be >= 0");
        if (d < 0.0 || d > 1.0) throw GlarsError("Liu parameter d must be in [0,1]");
        if (h_rule.explicit_h && *h_rule.explicit_h < 1)
            throw InvalidComponentCount("explicit h must be >= 1");
        if (!h_rule.explicit_h && (h_rule.threshold <= 0.0 || h_rule.threshold > 1.0))
            throw GlarsError("eigenvalue-share threshold must be in (0,1]");
    }

    bool uses_k() const {
        return kind == EstimatorKind::Re || kind == EstimatorKind::Aure ||
               kind == EstimatorKind::Rk;
    }
    bool uses_d() const {
        return kind == EstimatorKind::Le || kind == EstimatorKind::Aule ||
               kind == EstimatorKind::Rd;
    }
    bool uses_components() const {
        return kind == EstimatorKind::Pcre || kind == EstimatorKind::Rk ||
               kind == EstimatorKind::Rd;
    }
};

/// Paper-facing algorithm names (adpLARS-LASSO, adpLARS-EN, ...).
const char* estimator_name(EstimatorKind kind);
std::optional<EstimatorKind> estimator_from_name(const std::string& name);

}  // namespace glars
