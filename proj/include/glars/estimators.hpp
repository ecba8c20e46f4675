#pragma once

#include "glars/types.hpp"

#include <vector>

namespace glars {

/// Symmetric PSD gram matrix (X'X, possibly restricted to a column subset).
/// Construction validates symmetry to 1e-12 and clamps round-off negatives in
/// [-1e-10 * trace, 0); anything more negative is rejected.
struct GramMatrix {
    explicit GramMatrix(Matrix entries);
    const Matrix& entries() const { return entries_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

private:
    Matrix entries_;
};

/// Leading eigenpairs of a gram matrix: orthonormal columns, eigenvalues
/// descending, deterministic sign (largest-magnitude entry of each vector made
/// positive). Ties keep the solver's stable order.
struct EigenBasis {
    Matrix columns;        // q x h
    Vector eigenvalues;    // h, descending, nonnegative
};

/// OLS coefficients (X'X)^-1 X'y. Throws SingularGram when the smallest
/// eigenvalue of X'X falls below 1e-10 times the largest.
Vector fit_olse(const Matrix& x, const Vector& y);

/// The full-model p x p transform G with fit_biased = G * fit_olse.
Matrix full_transform(const EstimatorSpec& spec, const GramMatrix& gram);

/// G applied to the OLS fit.
Vector fit_biased(const Matrix& x, const Vector& y, const EstimatorSpec& spec);

/// Eigenvectors of `gram` kept by `rule` (explicit h, or smallest h whose
/// cumulative eigenvalue share reaches the threshold).
EigenBasis principal_eigenvectors(const GramMatrix& gram, const HRule& rule);

/// The active-set-restricted direction transform G_E as a p x q matrix.
/// `active` lists the selected column indices (the columns of E_i) in entry
/// order; `gram_full` is the p x p gram of the working design. All kinds
/// factor as E * (q x q core), so the result maps active-set vectors into
/// p-dimensional coefficient space supported on the active set.
Matrix restricted_transform(const EstimatorSpec& spec, const std::vector<int>& active,
                            const Matrix& gram_full);

/// The q x q core of G_E (restricted_transform without the E embedding).
Matrix restricted_transform_core(const EstimatorSpec& spec, const Matrix& gram_active);

}  // namespace glars
