#pragma once

#include "linfsindy/dynamics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace linfsindy {

/// Monomial x1^e1 * ... * xd^ed.
struct TermSpec {
    std::vector<unsigned> exponents;

    unsigned degree() const;
    bool operator==(const TermSpec&) const = default;
};

/// Candidate-function matrix: column j holds terms[j] evaluated on every state row.
struct DictionaryMatrix {
    Matrix matrix;
    std::vector<TermSpec> terms;
    unsigned max_degree = 0;
    std::size_t dimension = 0;

    std::size_t size() const { return terms.size(); }
};

/// All monomials of total degree <= max_degree in d variables.
///
/// Order: total degree ascending; within a degree, exponent vectors in
/// descending lexicographic order. For d=3, degree 2 this gives
/// 1, x, y, z, x^2, xy, xz, y^2, yz, z^2. Column indices in result files
/// refer to this order, which does not change between versions.
std::vector<TermSpec> enumerate_terms(std::size_t dimension, unsigned max_degree);

/// binomial(d + m, m)
std::size_t term_count(std::size_t dimension, unsigned max_degree);

/// Product of repeated multiplications starting from 1.0, variable by variable.
double evaluate_term(const TermSpec& term, const Eigen::Ref<const Vector>& state);

DictionaryMatrix build_dictionary(const Matrix& states, unsigned max_degree);

/// "x*y", "y^2", "1" for the constant term.
std::string term_label(const TermSpec& term, const std::vector<std::string>& var_names);

/// x, y, z for d <= 3, otherwise x1 ... xd.
std::vector<std::string> default_var_names(std::size_t dimension);

/// Max-abs of each column, 1 for all-zero columns. Dividing columns by these
/// and coefficients by the reciprocal leaves Theta*xi unchanged.
Vector column_scales(const Matrix& matrix);

} // namespace linfsindy
