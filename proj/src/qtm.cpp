#include "qfc/qtm.hpp"

#include <cmath>
#include <complex>
#include <set>
#include <sstream>

namespace qfc {

namespace {

const char kSymbols[] = {'0', '1', 'b'};

std::string sym_code(char s) {
    switch (s) {
        case '0': return "00";
        case '1': return "01";
        case 'b': return "10";
    }
    throw QtmError(std::string("bad tape symbol: ") + s);
}

char sym_decode(const std::string& two) {
    if (two == "00") return '0';
    if (two == "01") return '1';
    if (two == "10") return 'b';
    throw InvalidCode("bad symbol code " + two);
}

}  // namespace

std::uint64_t QtmSpec::time_bound(std::uint64_t n) const {
    std::uint64_t acc = 0, pow = 1;
    for (std::uint64_t c : time_poly) {
        acc += c * pow;
        pow *= n;
    }
    return acc;
}

QtmSpec QtmSpec::from_text(const std::string& text) {
    QtmSpec m;
    std::istringstream is(text);
    std::string line;
    auto parse_amp = [](const std::string& tok) -> Amplitude {
        if (tok.rfind("cos(", 0) == 0 && tok.back() == ')')
            return Amplitude(std::cos(parse_angle(tok.substr(4, tok.size() - 5))), 0);
        if (tok.rfind("-cos(", 0) == 0 && tok.back() == ')')
            return Amplitude(-std::cos(parse_angle(tok.substr(5, tok.size() - 6))), 0);
        if (tok.rfind("sin(", 0) == 0 && tok.back() == ')')
            return Amplitude(std::sin(parse_angle(tok.substr(4, tok.size() - 5))), 0);
        if (tok.rfind("-sin(", 0) == 0 && tok.back() == ')')
            return Amplitude(-std::sin(parse_angle(tok.substr(5, tok.size() - 6))), 0);
        if (tok.rfind("exp(i", 0) == 0 && tok.back() == ')')
            return std::polar(1.0, parse_angle(tok.substr(5, tok.size() - 6)));
        if (tok.size() >= 2 && tok.front() == '(' && tok.back() == ')') {
            auto comma = tok.find(',');
            if (comma == std::string::npos) throw QtmError("bad amplitude: " + tok);
            return Amplitude(std::strtod(tok.substr(1, comma - 1).c_str(), nullptr),
                             std::strtod(tok.substr(comma + 1, tok.size() - comma - 2).c_str(),
                                         nullptr));
        }
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == nullptr || *end != '\0') throw QtmError("bad amplitude: " + tok);
        return Amplitude(v, 0);
    };
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "state_bits") {
            if (!(ls >> m.state_bits) || m.state_bits < 1)
                throw QtmError("bad state_bits line");
        } else if (key == "time_bound") {
            std::uint64_t c;
            while (ls >> c) m.time_poly.push_back(c);
            if (m.time_poly.empty()) throw QtmError("time_bound needs coefficients");
        } else if (key == "delta") {
            std::string p, arrow, sym;
            if (!(ls >> p >> sym >> arrow) || arrow != "->")
                throw QtmError("bad delta line: " + line);
            if (sym.size() != 1 || (sym[0] != '0' && sym[0] != '1' && sym[0] != 'b'))
                throw QtmError("bad delta symbol: " + sym);
            std::vector<DeltaTarget> targets;
            std::string tok;
            while (ls >> tok) {
                if (tok.front() != '(') throw QtmError("expected (state sym dir): " + line);
                std::string qs = tok.substr(1);
                std::string tsym, dirs, ampkw, ampex;
                if (!(ls >> tsym >> dirs >> ampkw >> ampex) || ampkw != "amp")
                    throw QtmError("bad delta target: " + line);
                if (dirs.back() != ')') throw QtmError("expected ')' after direction: " + line);
                dirs.pop_back();
                Dir d;
                if (dirs == "L")
                    d = Dir::L;
                else if (dirs == "N")
                    d = Dir::N;
                else if (dirs == "R")
                    d = Dir::R;
                else
                    throw QtmError("bad direction: " + dirs);
                targets.push_back({qs, tsym[0], d, parse_amp(ampex)});
            }
            if (targets.empty()) throw QtmError("delta row without targets: " + line);
            m.delta[{p, sym[0]}] = targets;
        } else {
            throw QtmError("unknown line in machine spec: " + line);
        }
    }
    if (m.state_bits < 1) throw QtmError("machine spec missing state_bits");
    if (m.time_poly.empty()) throw QtmError("machine spec missing time_bound");
    // Normal-form rows for the final state are implied when absent.
    for (char s : kSymbols) {
        auto key = std::make_pair(m.qf(), s);
        if (!m.delta.count(key))
            m.delta[key] = {{m.q0(), s, Dir::R, Amplitude(1, 0)}};
    }
    return m;
}

namespace {

struct TripleKey {
    std::string q;
    char tau;
    int h;  // 2d - eps, or 99 for the natural symbol
    auto operator<=>(const TripleKey&) const = default;
};

// delta[p,sigma,tau|eps] as a sparse vector over (q, h) coordinates.
std::map<TripleKey, Amplitude> sep_vector(const QtmSpec& m, const std::string& p, char sigma,
                                          char tau, int eps) {
    static const std::map<int, std::vector<Dir>> d_of_eps = {
        {-2, {Dir::L}},
        {-1, {Dir::L, Dir::N}},
        {0, {Dir::N}},
        {1, {Dir::N, Dir::R}},
        {2, {Dir::R}}};
    static const std::map<Dir, double> e_count = {{Dir::L, 2}, {Dir::N, 3}, {Dir::R, 2}};
    std::map<TripleKey, Amplitude> v;
    auto it = m.delta.find({p, sigma});
    if (it == m.delta.end()) return v;
    for (const DeltaTarget& t : it->second) {
        if (t.symbol != tau) continue;
        bool in_deps = false;
        for (Dir d : d_of_eps.at(eps))
            if (d == t.dir) in_deps = true;
        if (!in_deps) continue;
        int h = eps == 0 ? 99 : 2 * static_cast<int>(t.dir) - eps;
        v[{t.state, tau, h}] += t.amp / std::sqrt(e_count.at(t.dir));
    }
    return v;
}

Amplitude conj_dot(const std::map<TripleKey, Amplitude>& a,
                   const std::map<TripleKey, Amplitude>& b) {
    Amplitude acc(0, 0);
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it != b.end()) acc += std::conj(v) * it->second;
    }
    return acc;
}

}  // namespace

Diagnostics check_wellformed(const QtmSpec& m) {
    Diagnostics out;
    const double tol = 1e-10;
    // Totality: every (p, sigma) needs a row (final-state rows included).
    std::set<std::string> states;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << m.state_bits); ++i) {
        std::string s;
        for (int b = m.state_bits - 1; b >= 0; --b) s += ((i >> b) & 1) ? '1' : '0';
        states.insert(s);
    }
    for (const auto& q : states)
        for (char s : kSymbols)
            if (!m.delta.count({q, s}))
                out.push_back({Severity::Error, q + std::string(1, s),
                               "missing delta row"});
    // (1) unit length.
    for (const auto& [key, row] : m.delta) {
        double n2 = 0;
        for (const auto& t : row) n2 += std::norm(t.amp);
        if (std::abs(n2 - 1.0) > tol)
            out.push_back({Severity::Error, key.first + std::string(1, key.second),
                           "unit-length violated (|row|^2 = " + std::to_string(n2) + ")"});
    }
    // (2) orthogonality over (q, tau, d) coordinates.
    for (auto it1 = m.delta.begin(); it1 != m.delta.end(); ++it1) {
        for (auto it2 = std::next(it1); it2 != m.delta.end(); ++it2) {
            Amplitude acc(0, 0);
            for (const auto& a : it1->second)
                for (const auto& b : it2->second)
                    if (a.state == b.state && a.symbol == b.symbol && a.dir == b.dir)
                        acc += std::conj(a.amp) * b.amp;
            if (std::abs(acc) > tol)
                out.push_back({Severity::Error,
                               it1->first.first + std::string(1, it1->first.second) + " vs " +
                                   it2->first.first + std::string(1, it2->first.second),
                               "orthogonality violated"});
        }
    }
    // (3) separability across distinct eps.
    std::vector<std::tuple<std::string, char, char>> triples;
    for (const auto& q : states)
        for (char s : kSymbols)
            for (char t : kSymbols) triples.emplace_back(q, s, t);
    for (int e1 = -2; e1 <= 2; ++e1) {
        for (int e2 = -2; e2 <= 2; ++e2) {
            if (e1 == e2) continue;
            for (const auto& [p1, s1, t1] : triples) {
                auto v1 = sep_vector(m, p1, s1, t1, e1);
                if (v1.empty()) continue;
                for (const auto& [p2, s2, t2] : triples) {
                    auto v2 = sep_vector(m, p2, s2, t2, e2);
                    if (v2.empty()) continue;
                    if (std::abs(conj_dot(v1, v2)) > tol) {
                        out.push_back({Severity::Error,
                                       p1 + std::string(1, s1) + std::string(1, t1) + "|" +
                                           std::to_string(e1) + " vs " + p2 +
                                           std::string(1, s2) + std::string(1, t2) + "|" +
                                           std::to_string(e2),
                                       "separability violated"});
                        if (out.size() > 40) return out;  // enough evidence
                    }
                }
            }
        }
    }
    return out;
}

Diagnostics check_shape(const QtmSpec& m) {
    Diagnostics out;
    const double tol = 1e-9;
    for (const auto& [key, row] : m.delta) {
        const auto& [p, sigma] = key;
        if (p == m.qf()) {
            bool ok = row.size() == 1 && row[0].state == m.q0() && row[0].symbol == sigma &&
                      row[0].dir == Dir::R && std::abs(row[0].amp - Amplitude(1, 0)) < tol;
            if (!ok)
                out.push_back({Severity::Error, p + std::string(1, sigma),
                               "normal form requires delta(qf,s) = |q0,s,R> with amplitude 1"});
            continue;
        }
        if (row.size() == 1) {
            if (std::abs(std::abs(row[0].amp) - 1.0) > tol)
                out.push_back({Severity::Error, p + std::string(1, sigma),
                               "plain form: single target must have unit-modulus amplitude"});
        } else if (row.size() == 2) {
            bool same = row[0].state == row[1].state && row[0].symbol == row[1].symbol &&
                        row[0].dir == row[1].dir;
            double a = row[0].amp.real(), b = row[1].amp.real();
            bool real_pair = std::abs(row[0].amp.imag()) < tol && std::abs(row[1].amp.imag()) < tol;
            if (same || !real_pair || std::abs(a * a + b * b - 1.0) > tol)
                out.push_back({Severity::Error, p + std::string(1, sigma),
                               "plain form: two targets must be distinct cos/sin pairs"});
        } else {
            out.push_back({Severity::Error, p + std::string(1, sigma),
                           "plain form allows at most two targets per row"});
        }
    }
    out.push_back({Severity::Warning, "",
                   "stationarity is a runtime obligation; run() verifies it"});
    return out;
}

double ConfigSuperposition::norm2() const {
    double s = 0;
    for (const auto& [k, v] : entries) s += std::norm(v);
    return s;
}

void ConfigSuperposition::prune() {
    for (auto it = entries.begin(); it != entries.end();) {
        if (std::norm(it->second) < kPruneEps2)
            it = entries.erase(it);
        else
            ++it;
    }
}

ConfigSuperposition initial_superposition(const QtmSpec& m, const std::string& x) {
    int n = static_cast<int>(x.size());
    if (n < 1) throw QtmError("input must be nonempty");
    int P = static_cast<int>(m.time_bound(n));
    if (n > P) throw QtmError("input longer than the essential region allows");
    SkewConfig c;
    c.z1 = std::string(P, 'b');
    c.z2 = std::string(P + 1, 'b');
    // x_1 rests in the start cell (section 5 layout; see decisions ledger).
    for (int i = 0; i < n; ++i) c.z2[i] = x[i];
    c.h = 0;
    c.q = m.q0();
    ConfigSuperposition sup;
    sup.n = n;
    sup.p_n = P;
    sup.entries[c] = Amplitude(1, 0);
    return sup;
}

ConfigSuperposition step_evolve(const QtmSpec& m, const ConfigSuperposition& c) {
    ConfigSuperposition out;
    out.n = c.n;
    out.p_n = c.p_n;
    for (const auto& [cfg, amp] : c.entries) {
        if (cfg.q == m.qf()) {
            out.entries[cfg] += amp;  // halted paths are carried unchanged
            continue;
        }
        char scanned = cfg.tape_at(cfg.h, c.p_n);
        auto it = m.delta.find({cfg.q, scanned});
        if (it == m.delta.end())
            throw QtmError("missing delta row for state " + cfg.q + " symbol " +
                           std::string(1, scanned));
        for (const DeltaTarget& t : it->second) {
            SkewConfig next = cfg;
            next.tape_set(cfg.h, c.p_n, t.symbol);
            next.h = cfg.h + static_cast<int>(t.dir);
            if (next.h < -c.p_n || next.h > c.p_n)
                throw HeadOutOfRegion("head left the essential region");
            next.q = t.state;
            out.entries[next] += amp * t.amp;
        }
    }
    out.prune();
    return out;
}

RunResult run(const QtmSpec& m, const std::string& x) {
    ConfigSuperposition sup = initial_superposition(m, x);
    std::uint64_t P = m.time_bound(x.size());
    std::uint64_t steps = 0;
    auto halted_split = [&](const ConfigSuperposition& s) {
        bool any_halted = false, any_running = false;
        for (const auto& [cfg, amp] : s.entries)
            (cfg.q == m.qf() ? any_halted : any_running) = true;
        return std::make_pair(any_halted, any_running);
    };
    for (;;) {
        auto [halted, running] = halted_split(sup);
        if (halted && running)
            throw NotSimultaneous("computation paths halt at different times");
        if (halted && !running) break;
        if (steps >= P) throw TimeBoundExceeded("machine exceeded its time bound");
        sup = step_evolve(m, sup);
        ++steps;
    }
    for (const auto& [cfg, amp] : sup.entries) {
        if (cfg.h != 0) throw NotStationary("final head position is not the start cell");
        if (cfg.z1.find_first_not_of('b') != std::string::npos)
            throw NotClean("non-blank symbol left of the start cell at halt");
    }
    return {sup, steps};
}

std::string encode_config(const SkewConfig& c, int p_n) {
    std::string bits = c.q;
    for (int cell = -p_n; cell <= p_n; ++cell) {
        bits += cell == c.h ? "11" : "10";
        bits += sym_code(c.tape_at(cell, p_n));
    }
    return bits;
}

SkewConfig decode_config(const std::string& bits, int state_bits, int p_n) {
    std::size_t want = static_cast<std::size_t>(8 * p_n + state_bits + 4);
    if (bits.size() != want) throw InvalidCode("code has wrong length");
    SkewConfig c;
    c.q = bits.substr(0, state_bits);
    c.z1 = std::string(p_n, 'b');
    c.z2 = std::string(p_n + 1, 'b');
    int heads = 0;
    std::size_t pos = state_bits;
    for (int cell = -p_n; cell <= p_n; ++cell, pos += 4) {
        std::string marker = bits.substr(pos, 2);
        if (marker == "11") {
            c.h = cell;
            ++heads;
        } else if (marker != "10") {
            throw InvalidCode("bad head marker " + marker);
        }
        c.tape_set(cell, p_n, sym_decode(bits.substr(pos + 2, 2)));
    }
    if (heads != 1) throw InvalidCode("code must mark exactly one head cell");
    return c;
}

std::string output_of(const SkewConfig& c, int p_n) {
    std::string out;
    for (int cell = 0; cell <= p_n; ++cell) {
        char s = c.tape_at(cell, p_n);
        if (s == 'b') return out;
        out += s;
    }
    return out;
}

std::string tilde_code(const std::string& s) {
    std::string out;
    for (char c : s) out += sym_code(c);
    out += "11";
    return out;
}

}  // namespace qfc
