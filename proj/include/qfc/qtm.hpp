// Single-tape quantum Turing machines: specification, well-formedness and
// shape checks, skew-configuration simulation over the essential tape region,
// and the 4-bit-per-cell configuration coding.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfc/state.hpp"
#include "qfc/term.hpp"

namespace qfc {

struct QtmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HeadOutOfRegion : QtmError {
    using QtmError::QtmError;
};
struct NotSimultaneous : QtmError {
    using QtmError::QtmError;
};
struct NotStationary : QtmError {
    using QtmError::QtmError;
};
struct NotClean : QtmError {
    using QtmError::QtmError;
};
struct TimeBoundExceeded : QtmError {
    using QtmError::QtmError;
};
struct InvalidCode : QtmError {
    using QtmError::QtmError;
};

enum class Dir : int { L = -1, N = 0, R = 1 };

struct DeltaTarget {
    std::string state;
    char symbol;  // '0', '1', 'b'
    Dir dir;
    Amplitude amp;
};

struct QtmSpec {
    int state_bits = 0;                     // states are bitstrings of this length
    std::vector<std::uint64_t> time_poly;   // p(n) coefficients, constant first
    // (state, scanned symbol) -> superposition of (state', written, move).
    std::map<std::pair<std::string, char>, std::vector<DeltaTarget>> delta;

    std::string q0() const { return std::string(state_bits, '0'); }
    std::string qf() const { return std::string(state_bits, '1'); }
    std::uint64_t time_bound(std::uint64_t n) const;

    static QtmSpec from_text(const std::string& text);
};

Diagnostics check_wellformed(const QtmSpec& m);
Diagnostics check_shape(const QtmSpec& m);

// Skew configuration over the essential region [-P, P]: z2 covers the start
// cell and the right region, z1 the left region.
struct SkewConfig {
    std::string z2;  // cells 0..P, length P+1
    std::string z1;  // cells -P..-1, length P
    int h = 0;
    std::string q;

    auto operator<=>(const SkewConfig&) const = default;

    char tape_at(int cell, int p_n) const {
        return cell < 0 ? z1[cell + p_n] : z2[cell];
    }
    void tape_set(int cell, int p_n, char sym) {
        if (cell < 0)
            z1[cell + p_n] = sym;
        else
            z2[cell] = sym;
    }
};

struct ConfigSuperposition {
    int n = 0;    // input length
    int p_n = 0;  // essential-region radius
    std::map<SkewConfig, Amplitude> entries;

    double norm2() const;
    void prune();
};

ConfigSuperposition initial_superposition(const QtmSpec& m, const std::string& x);

// One application of the skew time-evolution operator; halted components are
// carried unchanged.
ConfigSuperposition step_evolve(const QtmSpec& m, const ConfigSuperposition& c);

struct RunResult {
    ConfigSuperposition final_config;
    std::uint64_t steps = 0;
};

// Runs until every component halts; enforces simultaneous halting, the time
// bound, stationarity, and clean outputs.
RunResult run(const QtmSpec& m, const std::string& x);

// Code layout: q, then 2*p_n+1 cells of [marker(2) symbol(2)];
// markers 11 = head here / 10 = no head; symbols 00, 01, 10 = 0, 1, blank.
std::string encode_config(const SkewConfig& c, int p_n);
SkewConfig decode_config(const std::string& bits, int state_bits, int p_n);

// Output string: from the start cell right until the first blank.
std::string output_of(const SkewConfig& c, int p_n);

// Tilde code: two bits per symbol plus the 11 endmarker.
std::string tilde_code(const std::string& s);

}  // namespace qfc
