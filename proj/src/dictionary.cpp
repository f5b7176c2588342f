#include "linfsindy/dictionary.hpp"

#include "linfsindy/error.hpp"

#include <numeric>

namespace linfsindy {

unsigned TermSpec::degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0u);
}

namespace {

// Emits exponent vectors of fixed total degree in descending lexicographic order.
void emit_degree(std::size_t var, unsigned remaining, std::vector<unsigned>& current,
                 std::vector<TermSpec>& out) {
    if (var + 1 == current.size()) {
        current[var] = remaining;
        out.push_back(TermSpec{current});
        return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
        current[var] = e;
        emit_degree(var + 1, remaining - e, current, out);
    }
}

} // namespace

std::vector<TermSpec> enumerate_terms(std::size_t dimension, unsigned max_degree) {
    if (dimension == 0) throw ConfigError("dictionary dimension must be positive");
    std::vector<TermSpec> terms;
    std::vector<unsigned> current(dimension, 0);
    for (unsigned deg = 0; deg <= max_degree; ++deg) {
        emit_degree(0, deg, current, terms);
    }
    return terms;
}

std::size_t term_count(std::size_t dimension, unsigned max_degree) {
    // C(d+m, m) computed incrementally; exact for the sizes used here.
    std::size_t result = 1;
    for (unsigned i = 1; i <= max_degree; ++i) {
        result = result * (dimension + i) / i;
    }
    return result;
}

double evaluate_term(const TermSpec& term, const Eigen::Ref<const Vector>& state) {
    double value = 1.0;
    for (std::size_t k = 0; k < term.exponents.size(); ++k) {
        for (unsigned e = 0; e < term.exponents[k]; ++e) {
            value *= state[static_cast<Eigen::Index>(k)];
        }
    }
    return value;
}

DictionaryMatrix build_dictionary(const Matrix& states, unsigned max_degree) {
    if (states.rows() < 1 || states.cols() < 1) {
        throw InputError("build_dictionary: states must be non-empty");
    }
    if (max_degree < 1) throw ConfigError("build_dictionary: max_degree must be at least 1");
    if (!states.allFinite()) throw InputError("build_dictionary: non-finite state entries");

    DictionaryMatrix dict;
    dict.dimension = static_cast<std::size_t>(states.cols());
    dict.max_degree = max_degree;
    dict.terms = enumerate_terms(dict.dimension, max_degree);
    dict.matrix.resize(states.rows(), static_cast<Eigen::Index>(dict.terms.size()));
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        const Vector row = states.row(i).transpose();
        for (std::size_t j = 0; j < dict.terms.size(); ++j) {
            dict.matrix(i, static_cast<Eigen::Index>(j)) = evaluate_term(dict.terms[j], row);
        }
    }
    return dict;
}

std::string term_label(const TermSpec& term, const std::vector<std::string>& var_names) {
    if (var_names.size() != term.exponents.size()) {
        throw InputError("term_label: expected " + std::to_string(term.exponents.size()) +
                         " variable names");
    }
    std::string label;
    for (std::size_t k = 0; k < term.exponents.size(); ++k) {
        const unsigned e = term.exponents[k];
        if (e == 0) continue;
        if (!label.empty()) label += '*';
        label += var_names[k];
        if (e > 1) label += '^' + std::to_string(e);
    }
    return label.empty() ? "1" : label;
}

std::vector<std::string> default_var_names(std::size_t dimension) {
    if (dimension <= 3) {
        const std::vector<std::string> xyz{"x", "y", "z"};
        return {xyz.begin(), xyz.begin() + static_cast<std::ptrdiff_t>(dimension)};
    }
    std::vector<std::string> names;
    for (std::size_t k = 1; k <= dimension; ++k) names.push_back("x" + std::to_string(k));
    return names;
}

Vector column_scales(const Matrix& matrix) {
    Vector scales = matrix.cwiseAbs().colwise().maxCoeff().transpose();
    for (Eigen::Index j = 0; j < scales.size(); ++j) {
        if (scales[j] == 0.0) scales[j] = 1.0;
    }
    return scales;
}

} // namespace linfsindy
