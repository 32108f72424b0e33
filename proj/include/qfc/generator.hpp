// Deterministic random term generation for property suites.
#pragma once

#include <cstdint>
#include <random>

#include "qfc/term.hpp"

namespace qfc {

struct GenOptions {
    bool meas_free = true;
    int max_depth = 4;
    int max_switch_t = 4;
};

TermPtr random_term(std::mt19937_64& rng, const GenOptions& opt = {});

}  // namespace qfc
