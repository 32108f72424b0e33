#include "qfc/eval.hpp"

#include <cmath>
#include <mutex>
#include <set>
#include <sstream>

namespace qfc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

State eval_rec(const TermPtr& t, const State& phi, EvalStats* stats);

// Large shared subterms (the compiler's synthesized unitaries in particular)
// get re-evaluated on the same few window states thousands of times; memoize
// those calls. Instrumented evaluation bypasses the cache so fire counts stay
// exact. Keys hold shared ownership: a raw pointer could be recycled after a
// term is freed, which would alias cache entries.
std::size_t node_count(const TermPtr& t, std::map<TermPtr, std::size_t>& memo) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    std::size_t n = 1;
    if (t->g) n += node_count(t->g, memo);
    if (t->h) n += node_count(t->h, memo);
    if (t->p) n += node_count(t->p, memo);
    memo[t] = n;
    return n;
}

bool cacheable(const TermPtr& t) {
    thread_local std::map<TermPtr, std::size_t> counts;
    return node_count(t, counts) >= 48;
}

std::string state_key(const State& phi) {
    std::string key = std::to_string(phi.width());
    char buf[64];
    for (const auto& [bits, amp] : phi.entries()) {
        key += '|';
        key += bits;
        std::snprintf(buf, sizeof buf, ":%.17g,%.17g", amp.real(), amp.imag());
        key += buf;
    }
    return key;
}

struct EvalCache {
    std::map<TermPtr, std::unordered_map<std::string, State>> entries;
    std::size_t size = 0;
};

EvalCache& cache() {
    thread_local EvalCache c;
    return c;
}

State eval_initial(const Term& t, const State& phi) {
    // ell(phi) == 0 non-null: the space is one-dimensional, every unitary
    // initial function acts as the identity there.
    const int w = phi.width();
    State out(w);
    switch (t.kind) {
        case Kind::Id:
            return phi;
        case Kind::Phase: {
            if (w == 0) return phi;
            Amplitude ph = std::polar(1.0, t.theta);
            for (const auto& [k, v] : phi.entries()) out.add(k, k[0] == '1' ? v * ph : v);
            break;
        }
        case Kind::Rot: {
            if (w == 0) return phi;
            double c = std::cos(t.theta), s = std::sin(t.theta);
            for (const auto& [k, v] : phi.entries()) {
                std::string flipped = k;
                flipped[0] = k[0] == '0' ? '1' : '0';
                out.add(k, v * c);
                out.add(flipped, k[0] == '0' ? v * s : -v * s);
            }
            break;
        }
        case Kind::Not: {
            if (w == 0) return phi;
            for (const auto& [k, v] : phi.entries()) {
                std::string flipped = k;
                flipped[0] = k[0] == '0' ? '1' : '0';
                out.add(flipped, v);
            }
            break;
        }
        case Kind::Swap: {
            if (w <= 1) return phi;
            for (const auto& [k, v] : phi.entries()) {
                std::string sw = k;
                std::swap(sw[0], sw[1]);
                out.add(sw, v);
            }
            break;
        }
        case Kind::Meas: {
            if (w == 0) throw EvalError("measurement on a zero-qubit state");
            char want = t.bit == 0 ? '0' : '1';
            for (const auto& [k, v] : phi.entries())
                if (k[0] == want) out.add(k, v);
            break;
        }
        case Kind::Crot: {
            // On |phi'>|0^j>-shaped inputs: phase omega_j on the |1...0^j>
            // component. Negative j is the conjugate rotation. Identity when
            // the register is too short to hold control plus suffix.
            int j = std::abs(t.crot_j);
            if (w < j + 1) return phi;
            double ang = kTwoPi / std::ldexp(1.0, j);
            Amplitude ph = std::polar(1.0, t.crot_j > 0 ? ang : -ang);
            for (const auto& [k, v] : phi.entries()) {
                bool tail_zero = k.find('1', k.size() - j) == std::string::npos;
                out.add(k, (k[0] == '1' && tail_zero) ? v * ph : v);
            }
            break;
        }
        default:
            throw EvalError("not an initial function");
    }
    out.prune();
    return out;
}

State eval_rec(const TermPtr& t, const State& phi, EvalStats* stats) {
    // f(0) = 0 for every scheme; keeps sparse evaluation bounded.
    if (phi.is_null()) return phi;
    bool use_cache = stats == nullptr && phi.entries().size() <= 8 &&
                     (t->kind == Kind::Compo || t->kind == Kind::KQRec ||
                      t->kind == Kind::Switch || t->kind == Kind::Branch) &&
                     cacheable(t);
    std::string key;
    if (use_cache) {
        key = state_key(phi);
        auto& by_term = cache().entries[t];
        auto hit = by_term.find(key);
        if (hit != by_term.end()) return hit->second;
    }
    State result = [&]() -> State {
        switch (t->kind) {
        case Kind::Id:
        case Kind::Not:
        case Kind::Phase:
        case Kind::Rot:
        case Kind::Swap:
        case Kind::Meas:
        case Kind::Crot:
            return eval_initial(*t, phi);
        case Kind::Compo:
            return eval_rec(t->g, eval_rec(t->h, phi, stats), stats);
        case Kind::Switch:
            return phi.ell() <= t->t ? eval_rec(t->g, phi, stats) : eval_rec(t->h, phi, stats);
        case Kind::Branch: {
            if (phi.ell() <= 1) return phi;
            State out(phi.width());
            State lo = eval_rec(t->g, project_prefix("0", phi), stats);
            State hi = eval_rec(t->h, project_prefix("1", phi), stats);
            return tensor(State::basis("0"), lo).plus(tensor(State::basis("1"), hi));
        }
        case Kind::KQRec: {
            if (phi.ell() <= t->t) return eval_rec(t->g, phi, stats);
            if (stats) {
                ++stats->kqrec_fires;
                ++stats->fires_by_node[t.get()];
            }
            State pre = eval_rec(t->p, phi, stats);
            // Group sparse support by k-bit prefix instead of enumerating 2^k.
            std::set<std::string> prefixes;
            for (const auto& [k2, v] : pre.entries()) prefixes.insert(k2.substr(0, t->k));
            State acc(phi.width());
            for (const auto& s : prefixes) {
                State residual = project_prefix(s, pre);
                auto it = t->fs.find(s);
                if (it == t->fs.end()) throw EvalError("kqrec fs table missing entry " + s);
                State branch = it->second == FsKind::SelfRef ? eval_rec(t, residual, stats)
                                                             : residual;
                acc = acc.plus(tensor(State::basis(s), branch));
            }
            return eval_rec(t->h, acc, stats);
        }
        }
        throw EvalError("unknown term kind");
    }();
    if (use_cache) {
        EvalCache& c = cache();
        if (c.size > 2000000) {
            c.entries.clear();
            c.size = 0;
        }
        c.entries[t].emplace(std::move(key), result);
        ++c.size;
    }
    return result;
}

// Root validation cache; eval may be called many times on the same large
// term. Owning keys prevent address-recycling aliases.
std::mutex g_cache_mu;
std::set<TermPtr> g_validated;

void check_valid(const TermPtr& t, bool allow_crot) {
    {
        std::lock_guard<std::mutex> lock(g_cache_mu);
        if (g_validated.count(t)) return;
    }
    Diagnostics d = validate(t, allow_crot);
    if (!d.empty()) {
        std::ostringstream os;
        os << "invalid term:";
        for (const auto& diag : d) os << " [" << diag.path << "] " << diag.message << ";";
        throw InvalidTerm(os.str());
    }
    std::lock_guard<std::mutex> lock(g_cache_mu);
    g_validated.insert(t);
}

}  // namespace

State eval(const TermPtr& t, const State& phi, EvalStats* stats, bool allow_crot) {
    check_valid(t, allow_crot);
    return eval_rec(t, phi, stats);
}

std::vector<std::vector<Amplitude>> matrix_of(const TermPtr& t, int n, bool allow_crot) {
    if (n > kDenseCap) throw TooLarge("matrix_of beyond dense-size cap");
    check_valid(t, allow_crot);
    std::size_t dim = std::size_t(1) << n;
    std::vector<std::vector<Amplitude>> m(dim, std::vector<Amplitude>(dim, Amplitude(0, 0)));
    for (std::size_t col = 0; col < dim; ++col) {
        State out = eval(t, State::basis(index_to_bits(col, n)), nullptr, allow_crot);
        if (!out.is_null() && out.width() != n)
            throw EvalError("matrix_of: term changed register length");
        std::vector<Amplitude> v = densify(out, n);
        for (std::size_t row = 0; row < dim; ++row) m[row][col] = v[row];
    }
    return m;
}

double unitarity_defect(const std::vector<std::vector<Amplitude>>& m) {
    std::size_t dim = m.size();
    double worst = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            Amplitude acc(0, 0);
            for (std::size_t r = 0; r < dim; ++r) acc += std::conj(m[r][i]) * m[r][j];
            if (i == j) acc -= Amplitude(1, 0);
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

double max_abs_diff(const std::vector<std::vector<Amplitude>>& a,
                    const std::vector<std::vector<Amplitude>>& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
    return worst;
}

}  // namespace qfc
