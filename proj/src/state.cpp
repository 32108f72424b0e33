#include "qfc/state.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace qfc {

namespace {

void check_bits(const std::string& bits) {
    for (char c : bits)
        if (c != '0' && c != '1') throw StateError("bad bitstring: " + bits);
}

}  // namespace

State State::basis(const std::string& bits) {
    check_bits(bits);
    State s(static_cast<int>(bits.size()));
    s.entries_[bits] = Amplitude(1, 0);
    return s;
}

State State::scalar(Amplitude a) {
    State s(0);
    if (std::norm(a) >= kPruneEps2) s.entries_[""] = a;
    return s;
}

void State::add(const std::string& bits, Amplitude a) {
    if (static_cast<int>(bits.size()) != width_)
        throw StateError("entry width mismatch");
    entries_[bits] += a;
}

State& State::prune() {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (std::norm(it->second) < kPruneEps2)
            it = entries_.erase(it);
        else
            ++it;
    }
    return *this;
}

double State::norm2() const {
    double s = 0;
    for (const auto& [k, v] : entries_) s += std::norm(v);
    return s;
}

double State::norm() const { return std::sqrt(norm2()); }

State State::scaled(Amplitude a) const {
    State out(width_);
    for (const auto& [k, v] : entries_) out.entries_[k] = v * a;
    out.prune();
    return out;
}

State State::plus(const State& other) const {
    if (is_null()) return other;
    if (other.is_null()) return *this;
    if (width_ != other.width_) throw LengthMismatch("adding states of different length");
    State out(width_);
    out.entries_ = entries_;
    for (const auto& [k, v] : other.entries_) out.entries_[k] += v;
    out.prune();
    return out;
}

bool State::approx_equal(const State& other, double tol) const {
    const State* a = this;
    const State* b = &other;
    if (!a->is_null() && !b->is_null() && a->width_ != b->width_) return false;
    for (const auto& [k, v] : a->entries_)
        if (std::abs(v - b->amp(k)) > tol) return false;
    for (const auto& [k, v] : b->entries_)
        if (std::abs(v - a->amp(k)) > tol) return false;
    return true;
}

std::string State::to_text() const {
    std::ostringstream os;
    os << "qubits " << width_ << "\n";
    char buf[128];
    for (const auto& [k, v] : entries_) {
        std::snprintf(buf, sizeof buf, "%s %.17g %.17g\n", k.c_str(), v.real(), v.imag());
        os << buf;
    }
    return os.str();
}

State State::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    if (!(is >> tok) || tok != "qubits") throw StateError("state text: missing 'qubits' header");
    int n = -1;
    if (!(is >> n) || n < 0) throw StateError("state text: bad qubit count");
    State s(n);
    std::string bits;
    while (is >> bits) {
        double re, im;
        if (!(is >> re >> im)) throw StateError("state text: truncated entry");
        check_bits(bits);
        if (static_cast<int>(bits.size()) != n) throw StateError("state text: entry width mismatch");
        s.entries_[bits] += Amplitude(re, im);
    }
    s.prune();
    return s;
}

State tensor(const State& a, const State& b) {
    // Null absorbs: |phi> ox 0 = 0 ox |phi> = 0. Length-0 operands act as
    // scalar multiplication.
    State out(a.width() + b.width());
    if (a.is_null() || b.is_null()) return out;
    for (const auto& [ka, va] : a.entries())
        for (const auto& [kb, vb] : b.entries()) out.add(ka + kb, va * vb);
    out.prune();
    return out;
}

State project_prefix(const std::string& s, const State& phi) {
    if (phi.is_null()) return State(std::max(0, phi.width() - static_cast<int>(s.size())));
    if (static_cast<int>(s.size()) > phi.width())
        throw PrefixTooLong("projection prefix longer than register");
    State out(phi.width() - static_cast<int>(s.size()));
    for (const auto& [k, v] : phi.entries())
        if (k.compare(0, s.size(), s) == 0) out.add(k.substr(s.size()), v);
    out.prune();
    return out;
}

Amplitude inner(const State& a, const State& b) {
    if (a.is_null() || b.is_null()) return Amplitude(0, 0);
    if (a.width() != b.width()) throw LengthMismatch("inner product length mismatch");
    Amplitude acc(0, 0);
    for (const auto& [k, v] : a.entries()) acc += std::conj(v) * b.amp(k);
    return acc;
}

std::string index_to_bits(std::uint64_t idx, int n) {
    std::string s(n, '0');
    for (int i = n - 1; i >= 0; --i, idx >>= 1)
        if (idx & 1) s[i] = '1';
    return s;
}

std::uint64_t bits_to_index(const std::string& bits) {
    std::uint64_t x = 0;
    for (char c : bits) x = (x << 1) | (c == '1' ? 1u : 0u);
    return x;
}

std::vector<Amplitude> densify(const State& phi, int n) {
    if (n > kDenseCap) throw TooLarge("densify beyond dense-size cap");
    if (!phi.is_null() && phi.width() != n) throw LengthMismatch("densify width mismatch");
    std::vector<Amplitude> v(std::size_t(1) << n, Amplitude(0, 0));
    for (const auto& [k, a] : phi.entries()) v[bits_to_index(k)] = a;
    return v;
}

State sparsify(const std::vector<Amplitude>& v, int n) {
    if (v.size() != (std::size_t(1) << n)) throw StateError("sparsify size mismatch");
    State s(n);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::norm(v[i]) >= kPruneEps2) s.add(index_to_bits(i, n), v[i]);
    s.prune();
    return s;
}

State random_state(int n, std::uint64_t seed) {
    if (n < 1) throw StateError("random_state needs n >= 1");
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
    std::normal_distribution<double> g(0.0, 1.0);
    State s(n);
    std::uint64_t dim = std::uint64_t(1) << n;
    for (std::uint64_t i = 0; i < dim; ++i) s.add(index_to_bits(i, n), Amplitude(g(rng), g(rng)));
    double nm = s.norm();
    return s.scaled(Amplitude(1.0 / nm, 0)).prune();
}

}  // namespace qfc
