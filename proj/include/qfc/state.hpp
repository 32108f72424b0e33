// Sparse quantum state values (qustrings): an explicit register length plus
// complex amplitudes over basis bitstrings. The null vector is the empty map.
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfc {

using Amplitude = std::complex<double>;

// Entries whose squared magnitude falls below this are dropped after each
// operation, so cancellation leaves a detectable null instead of garbage.
inline constexpr double kPruneEps2 = 1e-28;  // (1e-14)^2

// Largest register densify/matrix_of will expand.
inline constexpr int kDenseCap = 12;

struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrefixTooLong : StateError {
    using StateError::StateError;
};
struct LengthMismatch : StateError {
    using StateError::StateError;
};
struct TooLarge : StateError {
    using StateError::StateError;
};

// A qustring in sparse form. Immutable by convention: operations return new
// values. Keys are '0'/'1' strings of length register_length(); an empty map
// is the null vector (its reported length ell() is 0 while the register width
// is kept for composition).
class State {
  public:
    State() : width_(0) {}
    explicit State(int width) : width_(width) {
        if (width < 0) throw StateError("negative register width");
    }

    static State basis(const std::string& bits);
    static State scalar(Amplitude a);  // length-0 state with value a

    int width() const { return width_; }
    bool is_null() const { return entries_.empty(); }
    // Paper convention: the null vector is "the qustring of length 0".
    int ell() const { return is_null() ? 0 : width_; }

    const std::map<std::string, Amplitude>& entries() const { return entries_; }

    Amplitude amp(const std::string& bits) const {
        auto it = entries_.find(bits);
        return it == entries_.end() ? Amplitude(0, 0) : it->second;
    }

    // Accumulate a contribution; caller must finish with prune().
    void add(const std::string& bits, Amplitude a);
    // Drop negligible entries. Returns *this for chaining.
    State& prune();

    double norm2() const;
    double norm() const;

    State scaled(Amplitude a) const;
    State plus(const State& other) const;

    bool approx_equal(const State& other, double tol = 1e-10) const;

    std::string to_text() const;
    static State from_text(const std::string& text);

  private:
    int width_;
    std::map<std::string, Amplitude> entries_;
};

State tensor(const State& a, const State& b);
// <s|phi>: residual after projecting the first |s| qubits onto s. Amplitudes
// are kept unnormalized; the result is null when nothing matches.
State project_prefix(const std::string& s, const State& phi);
Amplitude inner(const State& a, const State& b);

std::vector<Amplitude> densify(const State& phi, int n);
State sparsify(const std::vector<Amplitude>& v, int n);

State random_state(int n, std::uint64_t seed);

// Lexicographic index <-> bitstring helpers (|0...0> first).
std::string index_to_bits(std::uint64_t idx, int n);
std::uint64_t bits_to_index(const std::string& bits);

}  // namespace qfc
