#include "qfc/generator.hpp"

#include <cmath>
#include <set>

namespace qfc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

TermPtr gen(std::mt19937_64& rng, const GenOptions& opt, int depth) {
    std::uniform_int_distribution<int> leaf_pick(0, opt.meas_free ? 4 : 5);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    if (depth >= opt.max_depth) {
        switch (leaf_pick(rng)) {
            case 0: return t_id();
            case 1: return t_not();
            case 2: return t_phase(angle(rng));
            case 3: return t_rot(angle(rng));
            case 4: return t_swap();
            default: return t_meas(static_cast<int>(rng() & 1));
        }
    }
    std::uniform_int_distribution<int> pick(0, 9);
    int c = pick(rng);
    if (c <= 3) return gen(rng, opt, opt.max_depth);  // leaf
    if (c <= 5) return t_compo(gen(rng, opt, depth + 1), gen(rng, opt, depth + 1));
    if (c == 6) return t_branch(gen(rng, opt, depth + 1), gen(rng, opt, depth + 1));
    if (c == 7) {
        std::uniform_int_distribution<int> tt(1, opt.max_switch_t);
        return t_switch(tt(rng), gen(rng, opt, depth + 1), gen(rng, opt, depth + 1));
    }
    // Quantum recursion with k in {1, 2}; p stays meas-free by construction.
    int k = 1 + static_cast<int>(rng() & 1);
    std::uniform_int_distribution<int> tt(std::max(1, k - 1), std::max(k, 3));
    GenOptions sub = opt;
    sub.meas_free = true;
    std::map<std::string, FsKind> fs;
    std::set<std::string> selfs;
    std::vector<std::string> keys;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << k); ++i) {
        std::string s;
        for (int b = k - 1; b >= 0; --b) s += ((i >> b) & 1) ? '1' : '0';
        keys.push_back(s);
        fs[s] = (rng() & 1) ? FsKind::SelfRef : FsKind::Ident;
    }
    bool any = false;
    for (auto& [s, v] : fs) any = any || v == FsKind::SelfRef;
    if (!any) fs[keys[rng() % keys.size()]] = FsKind::SelfRef;
    return t_kqrec(k, tt(rng), gen(rng, opt, depth + 1), gen(rng, opt, depth + 1),
                   gen(rng, sub, depth + 1), std::move(fs));
}

}  // namespace

TermPtr random_term(std::mt19937_64& rng, const GenOptions& opt) {
    return gen(rng, opt, 0);
}

}  // namespace qfc
