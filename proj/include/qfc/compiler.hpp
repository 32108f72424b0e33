// Compiles a conservative, plain, clean-output QTM into calculus terms whose
// evaluation on padded basis inputs reproduces the machine's final skew
// configurations, and verifies the compiled terms against direct simulation.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfc/qtm.hpp"
#include "qfc/state.hpp"
#include "qfc/term.hpp"

namespace qfc {

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompileArtifact {
    TermPtr init_term;           // F1: builds the coded initial configuration
    TermPtr step_term;           // F2: one machine step on [q][cells][0000]
    TermPtr loop_term;           // F3: counter-driven step iteration
    TermPtr output_term;         // F4: tilde-coded output extraction
    TermPtr decode_output_term;  // F5: F4 plus tilde stripping to raw bits
    TermPtr full_term;           // F4 o F3 o F1
    TermPtr arrival_fix_term;    // erases the step records left by halting steps
    int state_bits = 0;
    std::vector<std::uint64_t> time_poly;
    std::string register_length_formula;
    std::string layout_notes;

    std::string manifest_text() const;
};

CompileArtifact compile_full(const QtmSpec& m);
TermPtr compile_initializer(const QtmSpec& m);
TermPtr compile_step(const QtmSpec& m);

// Padded input register for machine m on input x (basis form), and the same
// with an arbitrary n-qubit state in the x slot.
State padded_input(const QtmSpec& m, const std::string& x);
State padded_input_state(const QtmSpec& m, const State& phi);
int padded_length(const QtmSpec& m, int n);

struct VerifyReport {
    std::uint64_t steps = 0;
    double max_prefix_dev = 0;        // output-prefix squared amplitudes
    double max_condition_i_dev = 0;   // cross inner-product magnitudes
    double max_condition_ii_dev = 0;  // orthogonality across final configs
    double off_support_mass = 0;      // compiled mass outside expected support
    bool pass(double tol = 1e-6) const {
        return max_prefix_dev <= tol && max_condition_i_dev <= tol &&
               max_condition_ii_dev <= tol && off_support_mass <= tol;
    }
};

VerifyReport verify_against_qtm(const QtmSpec& m, const CompileArtifact& art,
                                const std::string& x);
// Same comparison for an arbitrary input-register state (superposed x).
VerifyReport verify_against_qtm_state(const QtmSpec& m, const CompileArtifact& art,
                                      const State& phi);

void write_artifact(const CompileArtifact& art, const std::string& dir);
CompileArtifact read_artifact(const std::string& dir);

}  // namespace qfc
