// State-vector semantics for calculus terms, plus dense matrix extraction.
#pragma once

#include <cstdint>
#include <unordered_map>

#include "qfc/state.hpp"
#include "qfc/term.hpp"

namespace qfc {

struct InvalidTerm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optional instrumentation: counts recursion-rule firings (case ell > t).
struct EvalStats {
    std::uint64_t kqrec_fires = 0;
    std::unordered_map<const Term*, std::uint64_t> fires_by_node;
};

// Evaluate t on phi. Validates the term once per root (cached); pass
// allow_crot to admit the controlled-rotation extension.
State eval(const TermPtr& t, const State& phi, EvalStats* stats = nullptr,
           bool allow_crot = false);

// Column x is densify(eval(t, basis(x))); lexicographic ordering, row-major.
std::vector<std::vector<Amplitude>> matrix_of(const TermPtr& t, int n,
                                              bool allow_crot = false);

// max |(U^dag U - I)_{ij}| — unitarity defect of a square matrix.
double unitarity_defect(const std::vector<std::vector<Amplitude>>& m);

double max_abs_diff(const std::vector<std::vector<Amplitude>>& a,
                    const std::vector<std::vector<Amplitude>>& b);

}  // namespace qfc
